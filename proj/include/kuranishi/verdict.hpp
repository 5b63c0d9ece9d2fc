#pragma once

#include "kuranishi/atlas_io.hpp"

#include <limits>
#include <string>
#include <vector>

namespace kuranishi {

enum class Status { Pass, Fail, Undetermined };
const char* status_name(Status s);

struct Witness {
  std::vector<IndexSet> charts;
  std::vector<Vec> points;
  std::vector<double> margins;
  std::string note;
};

struct Verdict {
  std::string check;
  Status status = Status::Pass;
  double margin = std::numeric_limits<double>::infinity();  // worst observed; larger is safer
  std::vector<Witness> witnesses;
  double tolerance = 0.0;
  Json details = Json::object();

  bool passed() const { return status == Status::Pass; }
  void fail(Witness w);
  void observe(double m) { margin = std::min(margin, m); }
};

// Worst status, smallest margin, concatenated witnesses.  Associative and commutative
// up to witness order; witnesses are kept in argument order.
Verdict merge(const std::string& name, const std::vector<Verdict>& parts);

Json witness_json(const Witness& w);
Json verdict_json(const Verdict& v);
Json vec_json(const Vec& x);
// Shortest round-trip doubles; inf and nan become strings.
Json number_json(double x);

}  // namespace kuranishi
