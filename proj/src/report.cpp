#include "ncdm/report.hpp"

namespace ncdm {

using nlohmann::json;

json to_json(const NcdValue& v) {
  json j;
  j["value"] = v.value;
  j["formula"] = to_string(v.formula);
  j["witness"] = v.witness ? json(v.witness->ids()) : json(nullptr);
  json chain = json::array();
  for (const auto& link : v.chain) {
    chain.push_back({{"removed", link.removed_id ? json(*link.removed_id) : json(nullptr)},
                     {"cardinality", link.cardinality},
                     {"ncd1", link.ncd1}});
  }
  j["chain"] = std::move(chain);
  j["compression_jobs"] = v.compression_jobs;
  return j;
}

namespace {

json violations(const std::vector<NormalityViolation>& vs, std::size_t checked) {
  json list = json::array();
  for (const auto& v : vs) {
    list.push_back({{"ids", v.ids}, {"slack", v.slack}, {"tolerance", v.tolerance}});
  }
  return {{"checked", checked}, {"violations", std::move(list)}, {"count", vs.size()}};
}

}  // namespace

json to_json(const NormalityReport& r) {
  return {{"idempotency", violations(r.idempotency, r.idempotency_checked)},
          {"monotonicity", violations(r.monotonicity, r.monotonicity_checked)},
          {"symmetry", violations(r.symmetry, r.symmetry_checked)},
          {"distributivity", violations(r.distributivity, r.distributivity_checked)},
          {"tolerance", {{"slack_base", r.options.slack_base},
                         {"log_slack", r.options.log_slack},
                         {"max_samples", r.options.max_samples},
                         {"seed", r.options.seed}}}};
}

json to_json(const ClassificationReport& r) {
  json items = json::array();
  for (const auto& it : r.items) {
    items.push_back({{"id", it.id},
                     {"truth", it.truth ? json(*it.truth) : json(nullptr)},
                     {"predicted", it.predicted},
                     {"scores", it.scores}});
  }
  return {{"method", to_string(r.method)},
          {"items", std::move(items)},
          {"n", r.n},
          {"correct", r.correct},
          {"accuracy", r.accuracy},
          {"ci", {{"level", r.level}, {"lo", r.ci.lo}, {"hi", r.ci.hi}}}};
}

json to_json(const SplitResult& s) {
  json restarts = json::array();
  for (const auto& r : s.restarts) {
    restarts.push_back({{"a", r.a.ids()},
                        {"b", r.b.ids()},
                        {"margin", r.margin},
                        {"iterations", r.iterations},
                        {"converged", r.converged}});
  }
  return {{"a", s.a.ids()},
          {"b", s.b.ids()},
          {"margin", s.margin},
          {"best_restart", s.best_restart},
          {"restarts", std::move(restarts)}};
}

json to_json(const PartitionNode& node) {
  json children = json::array();
  for (const auto& c : node.children) children.push_back(to_json(c));
  return {{"members", node.members.ids()},
          {"margin", node.margin ? json(*node.margin) : json(nullptr)},
          {"accepted", node.accepted},
          {"children", std::move(children)}};
}

json to_json(const PartitionTree& tree) {
  json classes = json::object();
  for (const auto& [label, node] : tree.classes) classes[label] = to_json(node);
  return {{"stop_margin", tree.stop_margin}, {"classes", std::move(classes)}};
}

json to_json(const datagen::CellModelParams& p) {
  return {{"upsilon", p.upsilon},
          {"lifespan_shape", p.lifespan_shape},
          {"lifespan_scale", p.lifespan_scale},
          {"r0_shape", p.r0_shape},
          {"r0_scale", p.r0_scale},
          {"population_limit", p.population_limit},
          {"founders", p.founders},
          {"min_track_length", p.min_track_length},
          {"max_track_length", p.max_track_length},
          {"motion", {{"run_speed", p.motion.run_speed},
                      {"run_mean_steps", p.motion.run_mean_steps},
                      {"tumble_mean_steps", p.motion.tumble_mean_steps},
                      {"tumble_step_sd", p.motion.tumble_step_sd}}},
          {"seed", p.seed}};
}

json population_manifest(const datagen::CellModelParams& p,
                         std::span<const datagen::CellTrack> cells,
                         std::span<const std::string> files) {
  json list = json::array();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    list.push_back({{"index", c.index},
                    {"parent", c.parent ? json(*c.parent) : json(nullptr)},
                    {"birth_time", c.birth_time},
                    {"lifespan", c.lifespan},
                    {"r0", c.r0},
                    {"length", c.length},
                    {"fate", datagen::to_string(c.fate)},
                    {"file", i < files.size() ? json(files[i]) : json(nullptr)}});
  }
  return {{"params", to_json(p)}, {"cells", std::move(list)}};
}

}  // namespace ncdm
