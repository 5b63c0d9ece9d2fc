#include "kuranishi/fixtures.hpp"

namespace kuranishi::fixtures {

namespace {

Json J(const char* text) { return Json::parse(text); }

}  // namespace

Json ex_change() {
  return J(R"({
  "dimension": 0, "basic_count": 2, "kind": "tame",
  "index_sets": [[1], [2], [1, 2]],
  "charts": [
    {"index": [1], "domain": [{"box": [[-2, 2]]}], "obstruction_dim": 1, "section": ["x1^4 - x1^2"]},
    {"index": [2], "domain": [{"box": [[-1, 2]], "constraints": ["1 - x1^4 + x1^2", "x1^4 - x1^2 + 1"]}],
     "obstruction_dim": 1, "section": ["x1^4 - x1^2"], "metric": {"pullback": [1, 2]}},
    {"index": [1, 2], "domain": [{"box": [[-1, 2], [-1, 1]]}], "obstruction_dim": 2, "section": ["x1^4 - x1^2", "x2"]}
  ],
  "changes": [
    {"source": [1], "target": [1, 2], "domain": [{"box": [[-1, 2]]}], "phi": ["x1", "0"], "hat_phi": [[1], [0]]},
    {"source": [2], "target": [1, 2],
     "domain": [{"box": [[-1, 2]], "constraints": ["1 - x1^4 + x1^2", "x1^4 - x1^2 + 1"]}],
     "phi": ["x1", "x1^4 - x1^2"], "hat_phi": [[1], [1]]}
  ]
})");
}

Json ex_nonlin() {
  return J(R"({
  "dimension": 1, "basic_count": 3, "kind": "weak",
  "index_sets": [[1], [2], [3], [1, 2], [1, 3], [2, 3]],
  "charts": [
    {"index": [1], "domain": [{"box": [["1/3", 1], [-1, 1]]}], "obstruction_dim": 1, "section": ["x2"]},
    {"index": [2], "domain": [{"box": [["2/3", "4/3"], [-1, 1]]}], "obstruction_dim": 1, "section": ["x2"]},
    {"index": [3], "domain": [{"box": [[1, "5/3"], [-1, 1]]}, {"box": [["1/2", 2], ["1/2", 1]]}],
     "obstruction_dim": 1, "section": ["x2"]},
    {"index": [1, 2], "domain": [{"box": [["2/3", 1], [-1, 1]]}], "obstruction_dim": 1, "section": ["x2"]},
    {"index": [1, 3], "domain": [{"box": [["4/3", "5/3"], [-1, 1]]}, {"box": [["2/3", 1], ["1/2", 1]]}],
     "obstruction_dim": 1, "section": ["x2"]},
    {"index": [2, 3], "domain": [{"box": [[1, "4/3"], [-1, 1]]}, {"box": [["5/3", 2], ["1/2", 1]]}],
     "obstruction_dim": 1, "section": ["x2"]}
  ],
  "changes": [
    {"source": [1], "target": [1, 2], "domain": [{"box": [["2/3", 1], [-1, 1]]}], "phi": ["x1", "x2"], "hat_phi": [[1]]},
    {"source": [2], "target": [1, 2], "domain": [{"box": [["2/3", 1], [-1, 1]]}], "phi": ["x1", "x2"], "hat_phi": [[1]]},
    {"source": [1], "target": [1, 3], "hat_phi": [[1]], "branches": [
      {"domain": [{"box": [["1/3", "2/3"], [-1, 1]]}], "phi": ["x1 + 1", "x2"]},
      {"domain": [{"box": [["2/3", 1], ["1/2", 1]]}], "phi": ["x1", "x2"]}]},
    {"source": [3], "target": [1, 3], "hat_phi": [[1]],
     "domain": [{"box": [["4/3", "5/3"], [-1, 1]]}, {"box": [["2/3", 1], ["1/2", 1]]}], "phi": ["x1", "x2"]},
    {"source": [2], "target": [2, 3], "hat_phi": [[1]], "branches": [
      {"domain": [{"box": [[1, "4/3"], [-1, 1]]}], "phi": ["x1", "x2"]},
      {"domain": [{"box": [["2/3", 1], ["1/2", 1]]}], "phi": ["x1 + 1", "x2"]}]},
    {"source": [3], "target": [2, 3], "hat_phi": [[1]],
     "domain": [{"box": [[1, "4/3"], [-1, 1]]}, {"box": [["5/3", 2], ["1/2", 1]]}], "phi": ["x1", "x2"]}
  ]
})");
}

Json ku30_additive() {
  // basic charts 1..3 are the trivial charts over F_i, chart 4 is the thickened circle
  Json doc = J(R"({
  "dimension": 1, "basic_count": 4, "kind": "weak",
  "index_sets": [[1], [2], [3], [4], [1, 2], [1, 3], [2, 3], [1, 4], [2, 4], [3, 4], [1, 2, 4], [1, 3, 4], [2, 3, 4]],
  "charts": [
    {"index": [1], "domain": [{"box": [["1/3", 1]]}], "obstruction_dim": 0, "section": []},
    {"index": [2], "domain": [{"box": [["2/3", "4/3"]]}], "obstruction_dim": 0, "section": []},
    {"index": [3], "domain": [{"box": [[1, "5/3"]]}], "obstruction_dim": 0, "section": []},
    {"index": [4], "domain": [{"box": [["1/2", "3/2"], ["-1/4", "1/4"]]}], "obstruction_dim": 1, "section": ["x2"]},
    {"index": [1, 2], "domain": [{"box": [["2/3", 1]]}], "obstruction_dim": 0, "section": []},
    {"index": [1, 3], "domain": [{"box": [["4/3", "5/3"]]}], "obstruction_dim": 0, "section": []},
    {"index": [2, 3], "domain": [{"box": [[1, "4/3"]]}], "obstruction_dim": 0, "section": []},
    {"index": [1, 4], "domain": [{"box": [["1/3", 1], [-1, 1]]}], "obstruction_dim": 1, "section": ["x2"]},
    {"index": [2, 4], "domain": [{"box": [["2/3", "4/3"], [-1, 1]]}], "obstruction_dim": 1, "section": ["x2"]},
    {"index": [3, 4], "domain": [{"box": [[1, "5/3"], [-1, 1]]}, {"box": [["1/2", 2], ["1/2", 1]]}],
     "obstruction_dim": 1, "section": ["x2"]},
    {"index": [1, 2, 4], "domain": [{"box": [["2/3", 1], [-1, 1]]}], "obstruction_dim": 1, "section": ["x2"]},
    {"index": [1, 3, 4], "domain": [{"box": [["4/3", "5/3"], [-1, 1]]}, {"box": [["2/3", 1], ["1/2", 1]]}],
     "obstruction_dim": 1, "section": ["x2"]},
    {"index": [2, 3, 4], "domain": [{"box": [[1, "4/3"], [-1, 1]]}, {"box": [["5/3", 2], ["1/2", 1]]}],
     "obstruction_dim": 1, "section": ["x2"]}
  ],
  "changes": [
    {"source": [1], "target": [1, 2], "domain": [{"box": [["2/3", 1]]}], "phi": ["x1"], "hat_phi": []},
    {"source": [2], "target": [1, 2], "domain": [{"box": [["2/3", 1]]}], "phi": ["x1"], "hat_phi": []},
    {"source": [1], "target": [1, 3], "domain": [{"box": [["1/3", "2/3"]]}], "phi": ["x1 + 1"], "hat_phi": []},
    {"source": [3], "target": [1, 3], "domain": [{"box": [["4/3", "5/3"]]}], "phi": ["x1"], "hat_phi": []},
    {"source": [2], "target": [2, 3], "domain": [{"box": [[1, "4/3"]]}], "phi": ["x1"], "hat_phi": []},
    {"source": [3], "target": [2, 3], "domain": [{"box": [[1, "4/3"]]}], "phi": ["x1"], "hat_phi": []},

    {"source": [1], "target": [1, 4], "domain": [{"box": [["1/3", 1]]}], "phi": ["x1", "0"], "hat_phi": [[]]},
    {"source": [2], "target": [2, 4], "domain": [{"box": [["2/3", "4/3"]]}], "phi": ["x1", "0"], "hat_phi": [[]]},
    {"source": [3], "target": [3, 4], "domain": [{"box": [[1, "5/3"]]}], "phi": ["x1", "0"], "hat_phi": [[]]},

    {"source": [4], "target": [1, 4], "hat_phi": [[1]], "branches": [
      {"domain": [{"box": [["1/2", 1], ["-1/4", "1/4"]]}], "phi": ["x1", "x2"]},
      {"domain": [{"box": [["4/3", "3/2"], ["-1/4", "1/4"]]}], "phi": ["x1 - 1", "x2"]}]},
    {"source": [4], "target": [2, 4], "domain": [{"box": [["2/3", "4/3"], ["-1/4", "1/4"]]}], "phi": ["x1", "x2"],
     "hat_phi": [[1]]},
    {"source": [4], "target": [3, 4], "hat_phi": [[1]], "branches": [
      {"domain": [{"box": [[1, "3/2"], ["-1/4", "1/4"]]}], "phi": ["x1", "x2"]},
      {"domain": [{"box": [["1/2", "2/3"], ["-1/4", "1/4"]]}], "phi": ["x1 + 1", "x2"]}]},

    {"source": [1], "target": [1, 2, 4], "domain": [{"box": [["2/3", 1]]}], "phi": ["x1", "0"], "hat_phi": [[]]},
    {"source": [2], "target": [1, 2, 4], "domain": [{"box": [["2/3", 1]]}], "phi": ["x1", "0"], "hat_phi": [[]]},
    {"source": [1], "target": [1, 3, 4], "domain": [{"box": [["1/3", "2/3"]]}], "phi": ["x1 + 1", "0"], "hat_phi": [[]]},
    {"source": [3], "target": [1, 3, 4], "domain": [{"box": [["4/3", "5/3"]]}], "phi": ["x1", "0"], "hat_phi": [[]]},
    {"source": [2], "target": [2, 3, 4], "domain": [{"box": [[1, "4/3"]]}], "phi": ["x1", "0"], "hat_phi": [[]]},
    {"source": [3], "target": [2, 3, 4], "domain": [{"box": [[1, "4/3"]]}], "phi": ["x1", "0"], "hat_phi": [[]]},

    {"source": [4], "target": [1, 2, 4], "domain": [{"box": [["2/3", 1], ["-1/4", "1/4"]]}], "phi": ["x1", "x2"],
     "hat_phi": [[1]]},
    {"source": [4], "target": [1, 3, 4], "hat_phi": [[1]], "branches": [
      {"domain": [{"box": [["1/2", "2/3"], ["-1/4", "1/4"]]}], "phi": ["x1 + 1", "x2"]},
      {"domain": [{"box": [["4/3", "3/2"], ["-1/4", "1/4"]]}], "phi": ["x1", "x2"]}]},
    {"source": [4], "target": [2, 3, 4], "domain": [{"box": [[1, "4/3"], ["-1/4", "1/4"]]}], "phi": ["x1", "x2"],
     "hat_phi": [[1]]},

    {"source": [1, 2], "target": [1, 2, 4], "domain": [{"box": [["2/3", 1]]}], "phi": ["x1", "0"], "hat_phi": [[]]},
    {"source": [1, 3], "target": [1, 3, 4], "domain": [{"box": [["4/3", "5/3"]]}], "phi": ["x1", "0"], "hat_phi": [[]]},
    {"source": [2, 3], "target": [2, 3, 4], "domain": [{"box": [[1, "4/3"]]}], "phi": ["x1", "0"], "hat_phi": [[]]},

    {"source": [1, 4], "target": [1, 2, 4], "domain": [{"box": [["2/3", 1], [-1, 1]]}], "phi": ["x1", "x2"],
     "hat_phi": [[1]]},
    {"source": [2, 4], "target": [1, 2, 4], "domain": [{"box": [["2/3", 1], [-1, 1]]}], "phi": ["x1", "x2"],
     "hat_phi": [[1]]},
    {"source": [1, 4], "target": [1, 3, 4], "hat_phi": [[1]], "branches": [
      {"domain": [{"box": [["1/3", "2/3"], [-1, 1]]}], "phi": ["x1 + 1", "x2"]},
      {"domain": [{"box": [["2/3", 1], ["1/2", 1]]}], "phi": ["x1", "x2"]}]},
    {"source": [3, 4], "target": [1, 3, 4], "hat_phi": [[1]],
     "domain": [{"box": [["4/3", "5/3"], [-1, 1]]}, {"box": [["2/3", 1], ["1/2", 1]]}], "phi": ["x1", "x2"]},
    {"source": [2, 4], "target": [2, 3, 4], "hat_phi": [[1]], "branches": [
      {"domain": [{"box": [[1, "4/3"], [-1, 1]]}], "phi": ["x1", "x2"]},
      {"domain": [{"box": [["2/3", 1], ["1/2", 1]]}], "phi": ["x1 + 1", "x2"]}]},
    {"source": [3, 4], "target": [2, 3, 4], "hat_phi": [[1]],
     "domain": [{"box": [[1, "4/3"], [-1, 1]]}, {"box": [["5/3", 2], ["1/2", 1]]}], "phi": ["x1", "x2"]}
  ]
})");
  return doc;
}

Json ku30_nonadditive() {
  return J(R"({
  "dimension": 0, "basic_count": 2, "kind": "weak",
  "index_sets": [[1], [2], [1, 2]],
  "charts": [
    {"index": [1], "domain": [{"box": [[0, 2]]}], "obstruction_dim": 1, "section": ["0"]},
    {"index": [2], "domain": [{"box": [[1, 3]]}], "obstruction_dim": 1, "section": ["0"]},
    {"index": [1, 2], "domain": [{"box": [[1, 2], [-1, 1], [-1, 1]]}], "obstruction_dim": 3, "section": ["x2", "x2", "x3"]}
  ],
  "changes": [
    {"source": [1], "target": [1, 2], "domain": [{"box": [[1, 2]]}], "phi": ["x1", "0", "0"], "hat_phi": [[1], [0], [0]]},
    {"source": [2], "target": [1, 2], "domain": [{"box": [[1, 2]]}], "phi": ["x1", "0", "0"], "hat_phi": [[0], [1], [0]]}
  ]
})");
}

Json ex_khomeo() {
  return J(R"({
  "dimension": 1, "basic_count": 2, "kind": "weak",
  "index_sets": [[1], [2], [1, 2]],
  "charts": [
    {"index": [1], "domain": [{"box": [[-2, 2]]}], "obstruction_dim": 0, "section": []},
    {"index": [2], "domain": [{"box": [[0, 2], [-1, 1]]}], "obstruction_dim": 1, "section": ["x2"]},
    {"index": [1, 2], "domain": [{"box": [[0, 2], [-1, 1]]}], "obstruction_dim": 1, "section": ["x2"]}
  ],
  "changes": [
    {"source": [1], "target": [1, 2], "domain": [{"box": [[0, 2]]}], "phi": ["x1", "0"], "hat_phi": [[]]},
    {"source": [2], "target": [1, 2], "domain": [{"box": [[0, 2], [-1, 1]]}], "phi": ["x1", "x2"], "hat_phi": [[1]]}
  ]
})");
}

Json index_fail() {
  return J(R"({
  "dimension": 0, "basic_count": 2, "kind": "weak",
  "index_sets": [[1], [2], [1, 2]],
  "charts": [
    {"index": [1], "domain": [{"box": [[-1, 1]]}], "obstruction_dim": 1, "section": ["x1"]},
    {"index": [2], "domain": [{"box": [[2, 3]]}], "obstruction_dim": 1, "section": ["x1 - 5/2"]},
    {"index": [1, 2], "domain": [{"box": [[-1, 1], [-1, 1]]}], "obstruction_dim": 2, "section": ["x1", "x1*x2"]}
  ],
  "changes": [
    {"source": [1], "target": [1, 2], "domain": [{"box": [[-1, 1]]}], "phi": ["x1", "0"], "hat_phi": [[1], [0]]},
    {"source": [2], "target": [1, 2], "branches": [], "hat_phi": [[0], [1]]}
  ]
})");
}

Json tame_exhaustion() {
  return J(R"({
  "dimension": 0, "basic_count": 3, "kind": "weak",
  "index_sets": [[1], [2], [3], [1, 2], [1, 3]],
  "charts": [
    {"index": [1], "domain": [{"box": [[-3, 3]]}], "obstruction_dim": 1, "section": ["x1^2 - 4"]},
    {"index": [2], "domain": [{"box": [[1, 3]]}], "obstruction_dim": 1, "section": ["x1^2 - 4"]},
    {"index": [3], "domain": [{"box": [[-3, -1]]}], "obstruction_dim": 1, "section": ["x1^2 - 4"]},
    {"index": [1, 2], "domain": [{"box": [[-1, 3], [-1, 1]]}], "obstruction_dim": 2, "section": ["x1^2 - 4", "x2"]},
    {"index": [1, 3], "domain": [{"box": [[-3, 1], [-1, 1]]}], "obstruction_dim": 2, "section": ["x1^2 - 4", "x2"]}
  ],
  "changes": [
    {"source": [1], "target": [1, 2], "domain": [{"box": [[-1, 3]]}], "phi": ["x1", "0"], "hat_phi": [[1], [0]]},
    {"source": [1], "target": [1, 3], "domain": [{"box": [[-3, 1]]}], "phi": ["x1", "0"], "hat_phi": [[1], [0]]},
    {"source": [2], "target": [1, 2], "domain": [{"box": [[1, 3]], "constraints": ["5 - x1^2", "x1^2 - 3"]}],
     "phi": ["x1", "x1^2 - 4"], "hat_phi": [[1], [1]]},
    {"source": [3], "target": [1, 3], "domain": [{"box": [[-3, -1]], "constraints": ["5 - x1^2", "x1^2 - 3"]}],
     "phi": ["x1", "x1^2 - 4"], "hat_phi": [[1], [1]]}
  ]
})");
}

Json bump_warp() {
  Json doc = J(R"({
  "dimension": 1, "basic_count": 3, "kind": "tame",
  "index_sets": [[1], [2], [3], [1, 2], [1, 3], [2, 3], [1, 2, 3]],
  "charts": [
    {"index": [1], "domain": [{"box": [[0, 2]]}], "obstruction_dim": 0, "section": []},
    {"index": [2], "domain": [{"box": [["1/2", "5/2"]]}], "obstruction_dim": 0, "section": []},
    {"index": [3], "domain": [{"box": [[1, 3]]}], "obstruction_dim": 0, "section": []},
    {"index": [1, 2], "domain": [{"box": [["1/2", 2]]}], "obstruction_dim": 0, "section": []},
    {"index": [1, 3], "domain": [{"box": [[1, 2]]}], "obstruction_dim": 0, "section": []},
    {"index": [2, 3], "domain": [{"box": [[1, "5/2"]]}], "obstruction_dim": 0, "section": []},
    {"index": [1, 2, 3], "domain": [{"box": [[1, 2]]}], "obstruction_dim": 0, "section": []}
  ],
  "changes": []
})");
  const Json warp = J(R"([{"center": ["5/4"], "radius": "1/5", "coeff": ["1/20"]}])");
  auto add = [&](Json src, Json tgt, const char* lo, const char* hi, bool warped) {
    Json c;
    c["source"] = src;
    c["target"] = tgt;
    c["domain"] = Json::array({Json{{"box", Json::array({Json::array({lo, hi})})}}});
    c["phi"] = Json::array({"x1"});
    if (warped) c["phi_bumps"] = warp;
    c["hat_phi"] = Json::array();
    doc["changes"].push_back(c);
  };
  add({1}, {1, 2}, "1/2", "2", true);
  add({2}, {1, 2}, "1/2", "2", true);
  add({1}, {1, 3}, "1", "2", true);
  add({3}, {1, 3}, "1", "2", true);
  add({2}, {2, 3}, "1", "5/2", true);
  add({3}, {2, 3}, "1", "5/2", true);
  add({1}, {1, 2, 3}, "1", "2", true);
  add({2}, {1, 2, 3}, "1", "2", true);
  add({3}, {1, 2, 3}, "1", "2", true);
  add({1, 2}, {1, 2, 3}, "1", "2", false);
  add({1, 3}, {1, 2, 3}, "1", "2", false);
  add({2, 3}, {1, 2, 3}, "1", "2", false);
  return doc;
}

Json stretch() {
  return J(R"({
  "dimension": 1, "basic_count": 2, "kind": "weak",
  "index_sets": [[1], [2], [1, 2]],
  "charts": [
    {"index": [1], "domain": [{"box": [[-1, 1]]}], "obstruction_dim": 0, "section": []},
    {"index": [2], "domain": [{"box": [[5, 6]]}], "obstruction_dim": 0, "section": []},
    {"index": [1, 2], "domain": [{"box": [[-2, 2], [-1, 1]]}], "obstruction_dim": 1, "section": ["x2"]}
  ],
  "changes": [
    {"source": [1], "target": [1, 2], "domain": [{"box": [[-1, 1]]}], "phi": ["2*x1", "0"], "hat_phi": [[]]},
    {"source": [2], "target": [1, 2], "branches": [], "hat_phi": [[]]}
  ]
})");
}

Json dependent_sum() {
  return J(R"({
  "dimension": 0, "basic_count": 2, "kind": "weak",
  "index_sets": [[1], [2], [1, 2]],
  "charts": [
    {"index": [1], "domain": [{"box": [[-1, 1]]}], "obstruction_dim": 1, "section": ["x1"]},
    {"index": [2], "domain": [{"box": [[-1, 1]]}], "obstruction_dim": 1, "section": ["x1"]},
    {"index": [1, 2], "domain": [{"box": [[-1, 1]]}], "obstruction_dim": 1, "section": ["x1"]}
  ],
  "changes": [
    {"source": [1], "target": [1, 2], "domain": [{"box": [[-1, 1]]}], "phi": ["x1"], "hat_phi": [[1]]},
    {"source": [2], "target": [1, 2], "domain": [{"box": [[-1, 1]]}], "phi": ["x1"], "hat_phi": [[1]]}
  ]
})");
}

Json single_chart(const std::vector<std::string>& section, const std::vector<std::pair<std::string, std::string>>& box,
                  int obstruction_dim) {
  Json doc;
  int m = obstruction_dim >= 0 ? obstruction_dim : static_cast<int>(section.size());
  doc["dimension"] = static_cast<int>(box.size()) - m;
  doc["basic_count"] = 1;
  doc["kind"] = "tame";
  doc["index_sets"] = Json::array({Json::array({1})});
  Json b = Json::array();
  for (const auto& [lo, hi] : box) b.push_back(Json::array({lo, hi}));
  Json chart;
  chart["index"] = Json::array({1});
  chart["domain"] = Json::array({Json{{"box", b}}});
  chart["obstruction_dim"] = m;
  chart["section"] = section;
  doc["charts"] = Json::array({chart});
  doc["changes"] = Json::array();
  return doc;
}

std::vector<std::string> names() {
  return {"ex_change", "ex_nonlin", "ku30_additive", "ku30_nonadditive", "ex_khomeo", "index_fail",
          "tame_exhaustion", "bump_warp", "stretch", "dependent_sum", "quartic", "identity", "cubic", "planar"};
}

Json by_name(const std::string& name) {
  if (name == "ex_change") return ex_change();
  if (name == "ex_nonlin") return ex_nonlin();
  if (name == "ku30_additive") return ku30_additive();
  if (name == "ku30_nonadditive") return ku30_nonadditive();
  if (name == "ex_khomeo") return ex_khomeo();
  if (name == "index_fail") return index_fail();
  if (name == "tame_exhaustion") return tame_exhaustion();
  if (name == "bump_warp") return bump_warp();
  if (name == "stretch") return stretch();
  if (name == "dependent_sum") return dependent_sum();
  if (name == "quartic") return single_chart({"x1^4 - x1^2"}, {{"-2", "2"}});
  if (name == "identity") return single_chart({"x1"}, {{"-1", "1"}});
  if (name == "cubic") return single_chart({"x1^3 - x1"}, {{"-2", "2"}});
  if (name == "planar") return single_chart({"x1^2 - x2^2 - 1/4", "2*x1*x2"}, {{"-2", "2"}, {"-2", "2"}});
  throw AtlasError(AtlasError::Kind::Schema, "unknown fixture '" + name + "'");
}

}  // namespace kuranishi::fixtures
