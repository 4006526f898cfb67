#include "fv/json_io.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace fv::io {

using nlohmann::json;

namespace {

Vec parse_vec(const json& j) {
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[int(i)] = j[i].get<double>();
  return v;
}

Mat parse_mat(const json& j) {
  if (j.empty()) throw std::invalid_argument("json: empty matrix");
  Mat M(j.size(), j[0].size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (j[i].size() != j[0].size()) throw std::invalid_argument("json: ragged matrix");
    for (size_t k = 0; k < j[i].size(); ++k) M(int(i), int(k)) = j[i][k].get<double>();
  }
  return M;
}

std::vector<Vec> parse_vec_list(const json& j) {
  std::vector<Vec> out;
  for (const auto& row : j) out.push_back(parse_vec(row));
  return out;
}

json mat_to_json(const Mat& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(row);
  }
  return rows;
}

SemiNorm parse_norm_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "ellipsoid") return SemiNorm::ellipsoidal(parse_mat(j.at("Q")));
  if (kind == "polytope_vertices") return SemiNorm::polytope_vertices(parse_vec_list(j.at("V")));
  if (kind == "polytope_facets") return SemiNorm::polytope_facets(parse_vec_list(j.at("H")));
  if (kind == "lp") {
    double p;
    if (j.at("p").is_string()) {
      const auto ps = j.at("p").get<std::string>();
      if (ps != "inf") throw std::invalid_argument("json: lp p must be a number or \"inf\"");
      p = std::numeric_limits<double>::infinity();
    } else {
      p = j.at("p").get<double>();
    }
    if (j.contains("scales")) return SemiNorm::lp(p, parse_vec(j.at("scales")));
    return SemiNorm::lp(p, j.at("dim").get<int>());
  }
  if (kind == "pullback")
    return SemiNorm::pullback_of(parse_norm_json(j.at("base")), parse_mat(j.at("L")));
  throw std::invalid_argument("json: unknown norm kind '" + kind + "'");
}

json norm_to_json_obj(const SemiNorm& s) {
  json j;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, SemiNorm::Ellipsoidal>) {
          j["kind"] = "ellipsoid";
          j["Q"] = mat_to_json(r.Q);
        } else if constexpr (std::is_same_v<T, SemiNorm::PolytopeVertices>) {
          j["kind"] = "polytope_vertices";
          json V = json::array();
          for (const auto& v : r.V) V.push_back(std::vector<double>(v.data(), v.data() + v.size()));
          j["V"] = V;
        } else if constexpr (std::is_same_v<T, SemiNorm::PolytopeFacets>) {
          j["kind"] = "polytope_facets";
          json H = json::array();
          for (const auto& h : r.H) H.push_back(std::vector<double>(h.data(), h.data() + h.size()));
          j["H"] = H;
        } else if constexpr (std::is_same_v<T, SemiNorm::LpNorm>) {
          j["kind"] = "lp";
          if (std::isinf(r.p)) j["p"] = "inf";
          else j["p"] = r.p;
          j["scales"] = std::vector<double>(r.scales.data(), r.scales.data() + r.scales.size());
        } else {
          j["kind"] = "pullback";
          j["base"] = norm_to_json_obj(*r.base);
          j["L"] = mat_to_json(r.L);
        }
      },
      s.repr());
  return j;
}

quad::Box parse_box(const json& j) {
  Vec lo(j.size()), hi(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    lo[int(i)] = j[i].at(0).get<double>();
    hi[int(i)] = j[i].at(1).get<double>();
  }
  return {lo, hi};
}

BoxUnion parse_region_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "all") return BoxUnion::all();
  BoxUnion u;
  for (const auto& b : j) u.boxes.push_back(parse_box(b));
  return u;
}

MapSpec parse_map_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "identity") return MapSpec::identity(j.at("dim").get<int>());
  if (kind == "linear") return MapSpec::linear(parse_mat(j.at("matrix")));
  if (kind == "expr" || kind == "poly") {
    std::vector<expr::Expression> comps;
    for (const auto& c : j.at("components"))
      comps.push_back(expr::Expression::parse(c.get<std::string>()));
    return MapSpec::expressions(std::move(comps), j.at("in_dim").get<int>());
  }
  throw std::invalid_argument("json: unknown map kind '" + kind + "'");
}

LipschitzMap parse_chart_map(const json& jmap, const json& jnorm) {
  // Position-dependent norm field?
  if (jnorm.contains("kind") && jnorm.at("kind").get<std::string>() == "ellipsoid_field") {
    std::vector<std::vector<expr::Expression>> entries;
    for (const auto& row : jnorm.at("Q")) {
      entries.emplace_back();
      for (const auto& e : row)
        entries.back().push_back(expr::Expression::parse(e.get<std::string>()));
    }
    const int m = int(entries.size());
    MapSpec spec = parse_map_json(jmap);
    LipschitzMap base =
        spec.linear_matrix()
            ? LipschitzMap::linear(*spec.linear_matrix(), SemiNorm::euclidean(m))
            : LipschitzMap(spec.in_dim(), spec.out_dim(),
                           [spec](const Vec& p) { return spec(p); }, SemiNorm::euclidean(m));
    return base.with_norm_field([entries, m](const Vec& x) {
      Mat Q(m, m);
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) Q(i, k) = entries[i][k](x);
      return SemiNorm::ellipsoidal(Q);
    });
  }
  const SemiNorm norm = parse_norm_json(jnorm);
  MapSpec spec = parse_map_json(jmap);
  if (spec.linear_matrix()) return LipschitzMap::linear(*spec.linear_matrix(), norm);
  return LipschitzMap(spec.in_dim(), spec.out_dim(), [spec](const Vec& p) { return spec(p); },
                      norm);
}

Atlas parse_atlas_json(const json& j) {
  Atlas atlas;
  for (const auto& jc : j.at("charts")) {
    Chart c{parse_box(jc.at("box")),
            nullptr,
            parse_chart_map(jc.at("map"), jc.at("target_norm")),
            1.0,
            1.0};
    if (jc.contains("bilip")) {
      c.bilip_lower = jc.at("bilip").at(0).get<double>();
      c.bilip_upper = jc.at("bilip").at(1).get<double>();
    }
    if (jc.contains("indicator")) {
      auto e = expr::Expression::parse(jc.at("indicator").get<std::string>());
      c.indicator = [e](const Vec& p) { return e(p) > 0.0; };
    }
    atlas.charts.push_back(std::move(c));
  }
  return validate_atlas(std::move(atlas));
}

Multiplicity parse_theta(const json& j) {
  if (j.is_number()) return Multiplicity::constant(j.get<double>());
  if (j.contains("const")) return Multiplicity::constant(j.at("const").get<double>());
  if (j.contains("expr"))
    return Multiplicity::expression(expr::Expression::parse(j.at("expr").get<std::string>()));
  if (j.contains("piecewise")) {
    std::vector<std::pair<quad::Box, double>> pieces;
    for (const auto& p : j.at("piecewise"))
      pieces.emplace_back(parse_box(p.at("box")), p.at("value").get<double>());
    return Multiplicity::piecewise(std::move(pieces));
  }
  throw std::invalid_argument("json: bad theta entry");
}

}  // namespace

SemiNorm parse_norm(const std::string& text) { return parse_norm_json(json::parse(text)); }

std::string norm_to_json(const SemiNorm& s) { return norm_to_json_obj(s).dump(); }

Atlas parse_atlas(const std::string& text) { return parse_atlas_json(json::parse(text)); }

DeskCurrent parse_current(const std::string& text) {
  const json j = json::parse(text);
  DeskCurrent T{parse_atlas_json(j.at("atlas")), {}, parse_norm_json(j.at("sigma"))};
  for (const auto& t : j.at("theta")) T.theta.push_back(parse_theta(t));
  return validate_current(std::move(T));
}

TestForm parse_form(const std::string& text, int) {
  const json j = json::parse(text);
  ScalarSpec f = ScalarSpec::constant(1.0);
  if (j.contains("f")) {
    const auto& jf = j.at("f");
    if (jf.is_number()) f = ScalarSpec::constant(jf.get<double>());
    else if (jf.is_string()) f = ScalarSpec::expression(expr::Expression::parse(jf.get<std::string>()));
    else if (jf.contains("indicator")) f = ScalarSpec::indicator(parse_region_json(jf.at("indicator")));
    else throw std::invalid_argument("json: bad form scalar");
  }
  return {f, parse_map_json(j.at("pi")), std::nullopt};
}

BoxUnion parse_region(const std::string& text) { return parse_region_json(json::parse(text)); }

MapSpec parse_map(const std::string& text) { return parse_map_json(json::parse(text)); }

JacobianKind parse_kind(const std::string& name, const std::string& sigma_json, int dim) {
  if (name == "busemann") return JacobianKind::busemann();
  if (name == "holmes-thompson") return JacobianKind::holmes_thompson();
  if (name == "inscribed-riemannian") return JacobianKind::inscribed_riemannian();
  if (name == "circumscribed-riemannian") return JacobianKind::circumscribed_riemannian();
  if (name == "mass-star") return JacobianKind::mass_star();
  if (name == "generic-sigma" || name == "sigma") {
    if (sigma_json.empty()) throw std::invalid_argument("kind generic-sigma needs --sigma");
    (void)dim;
    return JacobianKind::generic(parse_norm(sigma_json));
  }
  throw std::invalid_argument("unknown jacobian kind '" + name + "'");
}

std::string to_json(const JacobianResult& r, double j_ir_sigma) {
  json j;
  j["value"] = r.value;
  if (r.optimizer) j["F"] = mat_to_json(*r.optimizer);
  j["certificate"] = r.certificate;
  j["certified"] = r.certified;
  if (j_ir_sigma >= 0) j["j_ir_sigma"] = j_ir_sigma;
  return j.dump(2);
}

std::string to_json(const ConvexBodyVolume& v) {
  json j;
  j["value"] = v.value;
  j["method"] = v.method == VolumeMethod::exact_ellipsoid    ? "exact_ellipsoid"
                : v.method == VolumeMethod::exact_polytope   ? "exact_polytope"
                                                             : "quadrature";
  j["error_bound"] = v.error_bound;
  return j.dump(2);
}

std::string to_json(const FinslerVolume& v) {
  json j;
  j["value"] = v.value;
  j["error_estimate"] = v.error_estimate;
  return j.dump(2);
}

std::string to_json(const MassResult& m, const std::string& method) {
  json j;
  j["mass"] = m.value;
  j["method"] = method;
  j["error_bound"] = m.error_estimate;
  return j.dump(2);
}

std::string to_json(const MassComparison& c) {
  json j;
  j["m_inf"] = c.m_inf;
  j["m_sigma"] = c.m_sigma;
  j["m_2"] = c.m_2;
  j["C"] = c.c;
  j["chain_l2_ok"] = c.chain_l2_ok;
  j["chain_linf_ok"] = c.chain_linf_ok;
  if (!c.witness.empty()) j["witness"] = c.witness;
  return j.dump(2);
}

std::string to_json(const ConvexityReport& r) {
  json j;
  j["trials"] = r.trials;
  j["violations"] = r.violations;
  j["max_violation"] = r.max_violation;
  j["tol"] = r.tol;
  j["max_envelope_gap"] = r.max_envelope_gap;
  j["witnesses"] = r.witnesses;
  return j.dump(2);
}

std::string to_json(const AxiomCheckReport& r, const std::string& kind) {
  json j;
  j["kind"] = kind;
  j["transformation_checks"] = r.transformation_checks;
  j["max_transformation_residual"] = r.max_transformation_residual;
  j["monotone_pairs"] = r.monotone_pairs;
  j["monotonicity_violations"] = r.monotonicity_violations;
  j["contravariant_law_used"] = r.contravariant_law_used;
  return j.dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
}

}  // namespace fv::io
