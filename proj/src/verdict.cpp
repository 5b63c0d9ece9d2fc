#include "kuranishi/verdict.hpp"

#include <cmath>

namespace kuranishi {

const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Undetermined: return "undetermined";
  }
  return "undetermined";
}

void Verdict::fail(Witness w) {
  status = Status::Fail;
  witnesses.push_back(std::move(w));
}

Verdict merge(const std::string& name, const std::vector<Verdict>& parts) {
  Verdict v;
  v.check = name;
  for (const auto& p : parts) {
    if (p.status == Status::Fail) v.status = Status::Fail;
    else if (p.status == Status::Undetermined && v.status == Status::Pass) v.status = Status::Undetermined;
    v.margin = std::min(v.margin, p.margin);
    v.tolerance = std::max(v.tolerance, p.tolerance);
    v.witnesses.insert(v.witnesses.end(), p.witnesses.begin(), p.witnesses.end());
    v.details[p.check] = status_name(p.status);
  }
  return v;
}

Json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

Json vec_json(const Vec& x) {
  Json a = Json::array();
  for (int k = 0; k < x.size(); ++k) a.push_back(number_json(x[k]));
  return a;
}

Json witness_json(const Witness& w) {
  Json j;
  Json charts = Json::array();
  for (const auto& I : w.charts) charts.push_back(to_string(I));
  j["charts"] = charts;
  Json pts = Json::array();
  for (const auto& p : w.points) pts.push_back(vec_json(p));
  j["points"] = pts;
  Json m = Json::array();
  for (double x : w.margins) m.push_back(number_json(x));
  j["margins"] = m;
  if (!w.note.empty()) j["note"] = w.note;
  return j;
}

Json verdict_json(const Verdict& v) {
  Json j;
  j["check"] = v.check;
  j["status"] = status_name(v.status);
  j["margin"] = number_json(v.margin);
  Json w = Json::array();
  for (const auto& x : v.witnesses) w.push_back(witness_json(x));
  j["witnesses"] = w;
  j["tolerance"] = number_json(v.tolerance);
  if (!v.details.empty()) j["details"] = v.details;
  return j;
}

}  // namespace kuranishi
