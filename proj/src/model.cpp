#include "nhdeg/model.hpp"

#include <cmath>
#include <fstream>

#include "nhdeg/generator_basis.hpp"

namespace nhdeg {

namespace {

const cd I(0.0, 1.0);

Factor sin_of(int axis) { return {Trig::Sin, axis}; }
Factor cos_of(int axis) { return {Trig::Cos, axis}; }
constexpr int X = 0, Y = 1, Z = 2;

double factor_value(const Factor& f, const Momentum& k) {
  switch (f.fn) {
    case Trig::Sin: return std::sin(k[f.axis]);
    case Trig::Cos: return std::cos(k[f.axis]);
    default: return 1.0;
  }
}

std::map<std::string, double> merge(const ZooEntry& e, const std::map<std::string, double>& given) {
  std::map<std::string, double> p = e.defaults;
  for (const auto& [key, value] : given) {
    if (!p.count(key))
      throw std::invalid_argument("zoo: model '" + e.name + "' has no parameter '" + key + "'");
    if (!std::isfinite(value))
      throw std::invalid_argument("zoo: parameter '" + key + "' is not finite");
    p[key] = value;
  }
  return p;
}

std::vector<Term> pt_weyl(const std::map<std::string, double>& p) {
  const double t = p.at("t"), V = p.at("V"), l0 = p.at("lambda0");
  // d0 = 2 l0 sin kx, dx = 2t sin kx, dz = 2t sin ky,
  // dy = i [2t cos kz + 2V (2 - cos kx - cos ky)]
  return {
      {0, 2.0 * l0, {sin_of(X)}},
      {1, 2.0 * t, {sin_of(X)}},
      {2, 2.0 * t * I, {cos_of(Z)}},
      {2, 4.0 * V * I, {}},
      {2, -2.0 * V * I, {cos_of(X)}},
      {2, -2.0 * V * I, {cos_of(Y)}},
      {3, 2.0 * t, {sin_of(Y)}},
  };
}

std::vector<Term> psh_dirac(const std::map<std::string, double>& p) {
  const double t = p.at("t"), tz = p.at("tz"), lxx = p.at("lambda_Ixx"), lxy = p.at("lambda_Ixy"),
               m = p.at("m_I"), k0 = p.at("k0");
  std::vector<Term> terms;
  // [t (cos kx + cos ky - 2) + tz (cos kz - cos k0)] (2/sqrt3 U14 + sqrt(2/3) U15)
  for (auto [mu, w] : {std::pair{14, 2.0 / std::sqrt(3.0)}, std::pair{15, std::sqrt(2.0 / 3.0)}}) {
    terms.push_back({mu, w * t, {cos_of(X)}});
    terms.push_back({mu, w * t, {cos_of(Y)}});
    terms.push_back({mu, w * tz, {cos_of(Z)}});
    terms.push_back({mu, w * (-2.0 * t - tz * std::cos(k0)), {}});
  }
  terms.push_back({3, I * lxy, {sin_of(Y)}});
  terms.push_back({4, I * lxy, {sin_of(Y)}});
  terms.push_back({9, I * lxx, {sin_of(X)}});
  terms.push_back({10, I * lxx, {sin_of(X)}});
  // i m sin kz (cos kx - cos ky) (U7 - U12)
  terms.push_back({7, I * m, {sin_of(Z), cos_of(X)}});
  terms.push_back({7, -I * m, {sin_of(Z), cos_of(Y)}});
  terms.push_back({12, -I * m, {sin_of(Z), cos_of(X)}});
  terms.push_back({12, I * m, {sin_of(Z), cos_of(Y)}});
  return terms;
}

std::vector<Term> onp() {
  // sin kx (1/2 + i cos ky) U1 + sin ky (1/2 + i cos kz) U2 + sin kz (1/2 + i cos kx) U3
  return {
      {1, 0.5, {sin_of(X)}}, {1, I, {sin_of(X), cos_of(Y)}},
      {2, 0.5, {sin_of(Y)}}, {2, I, {sin_of(Y), cos_of(Z)}},
      {3, 0.5, {sin_of(Z)}}, {3, I, {sin_of(Z), cos_of(X)}},
  };
}

std::vector<Term> edge(const std::map<std::string, double>& p) {
  const double t = p.at("t"), V = p.at("V"), l0 = p.at("lambda0");
  // l0 cos kx U0 - iV (1 - cos kz) U1 + (2V cos ky - 2t cos kx) U1
  //   - 2t sin ky U2 - 2t sin kz U3
  return {
      {0, l0, {cos_of(X)}},
      {1, -I * V, {}},
      {1, I * V, {cos_of(Z)}},
      {1, 2.0 * V, {cos_of(Y)}},
      {1, -2.0 * t, {cos_of(X)}},
      {2, -2.0 * t, {sin_of(Y)}},
      {3, -2.0 * t, {sin_of(Z)}},
  };
}

std::vector<Term> trsdag() {
  return {{1, 1.0, {sin_of(X)}}, {2, I, {sin_of(Y)}}, {3, 1.0, {sin_of(Z)}}};
}

Trig parse_fn(const std::string& s) {
  if (s == "sin") return Trig::Sin;
  if (s == "cos") return Trig::Cos;
  if (s == "const") return Trig::Const;
  throw std::invalid_argument("model: unknown factor function '" + s + "'");
}

const char* fn_name(Trig t) {
  switch (t) {
    case Trig::Sin: return "sin";
    case Trig::Cos: return "cos";
    default: return "const";
  }
}

}  // namespace

int axis_index(const std::string& axis) {
  if (axis == "x") return 0;
  if (axis == "y") return 1;
  if (axis == "z") return 2;
  throw std::invalid_argument("unknown axis '" + axis + "' (expected x, y or z)");
}

const char* axis_name(int axis) {
  static const char* names[] = {"x", "y", "z"};
  return names[axis];
}

CMatrix eval_bloch(const ModelSpec& model, const Momentum& k) {
  const GeneratorBasis& b = basis(model.n);
  CMatrix H = CMatrix::Zero(model.n, model.n);
  for (const Term& term : model.terms) {
    cd c = term.coeff;
    for (const Factor& f : term.factors) c *= factor_value(f, k);
    H += c * b.matrices[term.mu];
  }
  return H;
}

const std::vector<ZooEntry>& zoo_entries() {
  static const std::vector<ZooEntry> entries = {
      {"pt-weyl-2b", 2, {{"t", 1.0}, {"V", 1.0}, {"lambda0", 1.0}}, true,
       "PT-symmetric Weyl-like two-band model"},
      {"psh-dirac-4b", 4,
       {{"t", 1.0}, {"tz", 1.0}, {"lambda_Ixx", 0.15}, {"lambda_Ixy", 0.15}, {"m_I", -0.27}, {"k0", kPi / 2}},
       true, "pseudo-Hermitian Dirac-like four-band model"},
      {"onp-2b", 2, {}, true, "two-band model with ordinary nodal points at {0, pi}^3"},
      {"edge-2b", 2, {{"t", 1.0}, {"V", 1.0}, {"lambda0", 2.3}}, true,
       "two-band model with Hermitian boundary states at kz = 0"},
      {"trsdag-2b", 2, {}, false, "non-paper TRS-dagger test model sin kx U1 + i sin ky U2 + sin kz U3"},
  };
  return entries;
}

ModelSpec zoo(const std::string& name, const std::map<std::string, double>& params) {
  for (const ZooEntry& e : zoo_entries()) {
    if (e.name != name) continue;
    ModelSpec m;
    m.n = e.bands;
    m.name = name;
    m.params = merge(e, params);
    if (name == "pt-weyl-2b") m.terms = pt_weyl(m.params);
    else if (name == "psh-dirac-4b") m.terms = psh_dirac(m.params);
    else if (name == "onp-2b") m.terms = onp();
    else if (name == "edge-2b") m.terms = edge(m.params);
    else m.terms = trsdag();
    return m;
  }
  throw std::invalid_argument("zoo: unknown model '" + name + "'");
}

ModelSpec model_from_json(const nlohmann::json& j) {
  try {
    ModelSpec m;
    m.name = j.value("name", std::string("custom"));
    m.n = j.at("bands").get<int>();
    if (m.n < 2 || m.n > 4) throw std::invalid_argument("model: bands must be 2, 3 or 4");
    for (const auto& jt : j.at("terms")) {
      Term t;
      t.mu = jt.at("mu").get<int>();
      if (t.mu < 0 || t.mu >= m.n * m.n)
        throw std::invalid_argument("model: generator index " + std::to_string(t.mu) + " out of range");
      const auto& c = jt.at("coeff");
      if (c.is_number()) {
        t.coeff = c.get<double>();
      } else {
        if (!c.is_array() || c.size() != 2) throw std::invalid_argument("model: coeff must be [re, im]");
        t.coeff = cd(c[0].get<double>(), c[1].get<double>());
      }
      if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
        throw std::invalid_argument("model: coefficient is not finite");
      if (jt.contains("factors")) {
        for (const auto& jf : jt.at("factors")) {
          Factor f;
          f.fn = parse_fn(jf.at("fn").get<std::string>());
          f.axis = jf.contains("axis") ? axis_index(jf.at("axis").get<std::string>()) : 0;
          t.factors.push_back(f);
        }
      }
      m.terms.push_back(std::move(t));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("model: malformed JSON: ") + e.what());
  }
}

nlohmann::json model_to_json(const ModelSpec& model) {
  nlohmann::json j;
  j["name"] = model.name;
  j["bands"] = model.n;
  j["terms"] = nlohmann::json::array();
  for (const Term& t : model.terms) {
    nlohmann::json jt;
    jt["mu"] = t.mu;
    jt["coeff"] = {t.coeff.real(), t.coeff.imag()};
    jt["factors"] = nlohmann::json::array();
    for (const Factor& f : t.factors) {
      nlohmann::json jf{{"fn", fn_name(f.fn)}};
      if (f.fn != Trig::Const) jf["axis"] = axis_name(f.axis);
      jt["factors"].push_back(jf);
    }
    j["terms"].push_back(jt);
  }
  return j;
}

ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace nhdeg
