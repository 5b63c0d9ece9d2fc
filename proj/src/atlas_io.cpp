#include "kuranishi/atlas_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace kuranishi {

namespace {

using K = AtlasError::Kind;

const Json& field(const Json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name)) throw AtlasError(K::Schema, where + ": missing field '" + name + "'");
  return j.at(name);
}

int int_field(const Json& j, const char* name, const std::string& where) {
  const Json& v = field(j, name, where);
  if (!v.is_number_integer()) throw AtlasError(K::Schema, where + ": field '" + name + "' must be an integer");
  return v.get<int>();
}

IndexSet parse_index(const Json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw AtlasError(K::Schema, where + ": index set must be a nonempty integer list");
  IndexSet I;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw AtlasError(K::Schema, where + ": index set must be a nonempty integer list");
    I.push_back(x.get<int>());
  }
  IndexSet s = I;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end() || s != I)
    throw AtlasError(K::Schema, where + ": index set must be sorted without repeats");
  return I;
}

Json index_json(const IndexSet& I) {
  Json a = Json::array();
  for (int i : I) a.push_back(i);
  return a;
}

std::vector<std::string> string_list(const Json& v, const std::string& where) {
  if (!v.is_array()) throw AtlasError(K::Schema, where + " must be a list of polynomial strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (s.is_string()) out.push_back(s.get<std::string>());
    else if (s.is_number()) out.push_back(rational_string(json_rational(s)));
    else throw AtlasError(K::Schema, where + " must be a list of polynomial strings");
  }
  return out;
}

}  // namespace

Rational json_rational(const Json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (v.is_number()) return to_rational(v.get<double>());
  throw AtlasError(K::Schema, "expected a number, got " + v.dump());
}

Json rational_json(const Rational& q) {
  if (q.get_den() == 1 && q.get_num().fits_slong_p()) return q.get_num().get_si();
  return rational_string(q);
}

Domain parse_domain(const Json& j, int expected_dim) {
  if (!j.is_array()) throw AtlasError(K::Schema, "domain must be a list of pieces");
  int dim = expected_dim;
  std::vector<DomainPiece> pieces;
  for (const auto& p : j) {
    const Json& b = field(p, "box", "domain piece");
    if (!b.is_array()) throw AtlasError(K::Schema, "box must be a list of [lo, hi] pairs");
    std::vector<Rational> lo, hi;
    for (const auto& iv : b) {
      if (!iv.is_array() || iv.size() != 2) throw AtlasError(K::Schema, "box must be a list of [lo, hi] pairs");
      lo.push_back(json_rational(iv[0]));
      hi.push_back(json_rational(iv[1]));
    }
    if (dim < 0) dim = static_cast<int>(lo.size());
    if (static_cast<int>(lo.size()) != dim) throw AtlasError(K::Dimension, "domain pieces disagree on dimension");
    DomainPiece piece{Box(lo, hi), {}};
    if (p.contains("constraints"))
      for (const auto& s : string_list(p.at("constraints"), "constraints")) piece.constraints.push_back(Polynomial::parse(s, dim));
    if (!piece.box.empty()) pieces.push_back(std::move(piece));
  }
  if (dim < 0) dim = 0;
  return Domain(dim, std::move(pieces)).simplified();
}

Json domain_json(const Domain& d) {
  Json out = Json::array();
  for (const auto& p : d.pieces()) {
    Json box = Json::array();
    for (int k = 0; k < d.dim(); ++k) box.push_back(Json::array({rational_json(p.box.lo[k]), rational_json(p.box.hi[k])}));
    Json cons = Json::array();
    for (const auto& c : p.constraints) cons.push_back(c.to_string());
    Json piece;
    piece["box"] = box;
    piece["constraints"] = cons;
    out.push_back(piece);
  }
  return out;
}

SmoothMap parse_smooth_map(const Json& components, const Json* bumps, int dom) {
  std::vector<Polynomial> c;
  for (const auto& s : string_list(components, "map components")) c.push_back(Polynomial::parse(s, dom));
  std::vector<BumpTerm> bs;
  if (bumps && !bumps->is_null()) {
    if (!bumps->is_array()) throw AtlasError(K::Schema, "bumps must be a list");
    for (const auto& b : *bumps) {
      BumpTerm t;
      for (const auto& x : field(b, "center", "bump")) t.center.push_back(json_rational(x));
      t.radius = json_rational(field(b, "radius", "bump"));
      for (const auto& s : string_list(field(b, "coeff", "bump"), "bump coeff")) t.coeff.push_back(Polynomial::parse(s, dom));
      bs.push_back(std::move(t));
    }
  }
  return SmoothMap(dom, std::move(c), std::move(bs));
}

Json smooth_map_components(const SmoothMap& m) {
  Json out = Json::array();
  for (const auto& p : m.components()) out.push_back(p.to_string());
  return out;
}

Json smooth_map_bumps(const SmoothMap& m) {
  Json out = Json::array();
  for (const auto& b : m.bumps()) {
    Json t;
    Json c = Json::array();
    for (const auto& x : b.center) c.push_back(rational_json(x));
    t["center"] = c;
    t["radius"] = rational_json(b.radius);
    Json co = Json::array();
    for (const auto& p : b.coeff) co.push_back(p.to_string());
    t["coeff"] = co;
    out.push_back(t);
  }
  return out;
}

RationalMatrix parse_matrix(const Json& rows, int nrows, int ncols) {
  if (!rows.is_array()) throw AtlasError(K::Schema, "matrix must be a list of rows");
  if (static_cast<int>(rows.size()) != nrows)
    throw AtlasError(K::Dimension, "matrix has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(nrows));
  RationalMatrix m(nrows, ncols);
  for (int r = 0; r < nrows; ++r) {
    const Json& row = rows[r];
    if (!row.is_array() || static_cast<int>(row.size()) != ncols)
      throw AtlasError(K::Dimension, "matrix row " + std::to_string(r) + " has the wrong length");
    for (int c = 0; c < ncols; ++c) m(r, c) = json_rational(row[c]);
  }
  return m;
}

Json matrix_json(const RationalMatrix& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(rational_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

namespace {

Atlas parse_atlas_impl(const Json& doc) {
  if (!doc.is_object()) throw AtlasError(K::Schema, "atlas document must be an object");
  Atlas a;
  a.dimension = int_field(doc, "dimension", "atlas");
  a.basic_count = int_field(doc, "basic_count", "atlas");
  if (doc.contains("kind")) a.kind = parse_declared_kind(doc.at("kind").get<std::string>());
  if (doc.contains("concordance")) a.concordance = doc.at("concordance").get<bool>();
  for (const auto& v : field(doc, "index_sets", "atlas")) a.index_sets.push_back(parse_index(v, "index_sets"));
  std::sort(a.index_sets.begin(), a.index_sets.end(), [](const IndexSet& x, const IndexSet& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });
  if (std::adjacent_find(a.index_sets.begin(), a.index_sets.end()) != a.index_sets.end())
    throw AtlasError(K::Schema, "index_sets contains a repeat");

  for (const auto& cj : field(doc, "charts", "atlas")) {
    Chart c;
    c.index = parse_index(field(cj, "index", "chart"), "chart index");
    std::string where = "chart " + to_string(c.index);
    c.domain = parse_domain(field(cj, "domain", where));
    c.obstruction_dim = int_field(cj, "obstruction_dim", where);
    if (c.obstruction_dim < 0) throw AtlasError(K::Schema, where + ": negative obstruction_dim");
    const Json* bumps = cj.contains("section_bumps") ? &cj.at("section_bumps") : nullptr;
    c.section = parse_smooth_map(field(cj, "section", where), bumps, c.domain.dim());
    if (c.section.codomain_dim() != c.obstruction_dim)
      throw AtlasError(K::Dimension, where + ": section has " + std::to_string(c.section.codomain_dim()) +
                                         " components, obstruction_dim is " + std::to_string(c.obstruction_dim));
    if (cj.contains("metric")) {
      const Json& m = cj.at("metric");
      if (m.is_string() && m.get<std::string>() == "euclidean") {
      } else if (m.is_object() && m.contains("pullback")) {
        c.metric.kind = MetricKind::Pullback;
        c.metric.target = parse_index(m.at("pullback"), where + " metric");
      } else {
        throw AtlasError(K::Schema, where + ": metric must be \"euclidean\" or {\"pullback\": [...]}");
      }
    }
    if (a.charts.count(c.index)) throw AtlasError(K::Schema, where + " given twice");
    a.charts[c.index] = std::move(c);
  }

  if (doc.contains("changes"))
    for (const auto& chj : doc.at("changes")) {
      IndexSet I = parse_index(field(chj, "source", "change"), "change source");
      IndexSet J = parse_index(field(chj, "target", "change"), "change target");
      std::string where = "change " + to_string(I) + "->" + to_string(J);
      if (!a.has_chart(I) || !a.has_chart(J)) throw AtlasError(K::Schema, where + ": unknown chart");
      const Chart &ci = a.chart(I), &cjj = a.chart(J);
      std::vector<ChangeBranch> branches;
      auto one = [&](const Json& bj) {
        Domain d = parse_domain(field(bj, "domain", where), ci.dim());
        const Json* bumps = bj.contains("phi_bumps") ? &bj.at("phi_bumps") : nullptr;
        SmoothMap phi = parse_smooth_map(field(bj, "phi", where), bumps, ci.dim());
        if (phi.codomain_dim() != cjj.dim()) throw AtlasError(K::Dimension, where + ": phi has the wrong number of components");
        if (!d.empty()) branches.push_back(ChangeBranch{d, phi});
      };
      if (chj.contains("branches"))
        for (const auto& bj : chj.at("branches")) one(bj);
      else
        one(chj);
      RationalMatrix hat = parse_matrix(field(chj, "hat_phi", where), cjj.obstruction_dim, ci.obstruction_dim);
      if (hat.rank() != ci.obstruction_dim) throw AtlasError(K::Rank, where + ": hat_phi does not have full column rank");
      if (a.has_change(I, J)) throw AtlasError(K::Schema, where + " given twice");
      a.changes.emplace(std::make_pair(I, J), CoordinateChange(I, J, std::move(branches), hat, ci.dim(), cjj.dim()));
    }

  if (doc.contains("orientation"))
    for (const auto& oj : doc.at("orientation")) {
      OrientationFrame f;
      f.index = parse_index(field(oj, "index", "orientation"), "orientation index");
      const Chart& c = a.chart(f.index);
      f.domain_frame = oj.contains("domain_frame") ? parse_matrix(oj.at("domain_frame"), c.dim(), c.dim())
                                                   : RationalMatrix::identity(c.dim());
      f.obstruction_frame = oj.contains("obstruction_frame")
                                ? parse_matrix(oj.at("obstruction_frame"), c.obstruction_dim, c.obstruction_dim)
                                : RationalMatrix::identity(c.obstruction_dim);
      f.sign = oj.contains("sign") ? oj.at("sign").get<int>() : 1;
      a.orientation[f.index] = f;
    }
  a.check_structure();
  return a;
}

}  // namespace

Atlas parse_atlas(const Json& doc) {
  try {
    return parse_atlas_impl(doc);
  } catch (const nlohmann::json::exception& e) {
    throw AtlasError(K::Schema, std::string("atlas document: ") + e.what());
  }
}

Json atlas_json(const Atlas& a) {
  Json doc;
  doc["dimension"] = a.dimension;
  doc["basic_count"] = a.basic_count;
  doc["kind"] = declared_kind_name(a.kind);
  if (a.concordance) doc["concordance"] = true;
  Json sets = Json::array();
  for (const auto& I : a.index_sets) sets.push_back(index_json(I));
  doc["index_sets"] = sets;
  Json charts = Json::array();
  for (const auto& I : a.index_sets) {
    const Chart& c = a.chart(I);
    Json cj;
    cj["index"] = index_json(I);
    cj["domain"] = domain_json(c.domain);
    cj["obstruction_dim"] = c.obstruction_dim;
    cj["section"] = smooth_map_components(c.section);
    if (!c.section.bumps().empty()) cj["section_bumps"] = smooth_map_bumps(c.section);
    if (c.metric.kind == MetricKind::Pullback) cj["metric"] = Json{{"pullback", index_json(c.metric.target)}};
    charts.push_back(cj);
  }
  doc["charts"] = charts;
  Json changes = Json::array();
  for (const auto& [key, ch] : a.changes) {
    Json cj;
    cj["source"] = index_json(key.first);
    cj["target"] = index_json(key.second);
    Json br = Json::array();
    for (const auto& b : ch.branches()) {
      Json bj;
      bj["domain"] = domain_json(b.domain);
      bj["phi"] = smooth_map_components(b.phi);
      if (!b.phi.bumps().empty()) bj["phi_bumps"] = smooth_map_bumps(b.phi);
      br.push_back(bj);
    }
    if (br.size() == 1) {
      cj["domain"] = br[0]["domain"];
      cj["phi"] = br[0]["phi"];
      if (br[0].contains("phi_bumps")) cj["phi_bumps"] = br[0]["phi_bumps"];
    } else {
      cj["branches"] = br;
    }
    cj["hat_phi"] = matrix_json(ch.hat_phi());
    changes.push_back(cj);
  }
  doc["changes"] = changes;
  if (!a.orientation.empty()) {
    Json o = Json::array();
    for (const auto& [I, f] : a.orientation) {
      Json fj;
      fj["index"] = index_json(I);
      fj["domain_frame"] = matrix_json(f.domain_frame);
      fj["obstruction_frame"] = matrix_json(f.obstruction_frame);
      fj["sign"] = f.sign;
      o.push_back(fj);
    }
    doc["orientation"] = o;
  }
  return doc;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw AtlasError(K::Schema, "cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw AtlasError(K::Schema, "'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw AtlasError(K::Other, "cannot write '" + path + "'");
  out << doc.dump(2) << "\n";
}

}  // namespace kuranishi
