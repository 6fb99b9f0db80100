#include "ltp/dataset.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "ltp/errors.hpp"

namespace ltp {

namespace {

using nlohmann::json;

constexpr const char* kHeader = "format_version=1";

json state_to_json(const AgentState& s) {
  return json::array({s.position.x, s.position.y, s.velocity.x, s.velocity.y, s.heading});
}

AgentState state_from_json(const json& j, AgentId id) {
  if (!j.is_array() || j.size() != 5) throw DomainError("state must be [x, y, vx, vy, heading]");
  AgentState s;
  s.position = {j[0].get<double>(), j[1].get<double>()};
  s.velocity = {j[2].get<double>(), j[3].get<double>()};
  s.heading = j[4].get<double>();
  s.agent_id = id;
  return s;
}

BehaviorLabel label_from_json(const json& j) {
  auto label = behavior_label_from_string(j.get<std::string>());
  if (!label) throw DomainError("unknown behavior label '" + j.get<std::string>() + "'");
  return *label;
}

json record_to_json(const DatasetRecord& r) {
  json ego = json::array();
  for (const auto& s : r.driving_case.ego_history) ego.push_back(state_to_json(s));
  json agents = json::array();
  for (std::size_t i = 0; i < r.driving_case.agents.size(); ++i) {
    const auto& hist = r.driving_case.agents[i];
    json h = json::array();
    for (const auto& s : hist.states) h.push_back(state_to_json(s));
    json f = json::array();
    for (const auto& p : r.futures.at(i).positions) f.push_back(json::array({p.x, p.y}));
    agents.push_back({{"id", hist.agent_id},
                      {"label", std::string(to_string(r.agent_labels.at(i)))},
                      {"history", std::move(h)},
                      {"future", std::move(f)}});
  }
  return {{"t", r.driving_case.timestamp},
          {"case_label", std::string(to_string(r.case_label))},
          {"ego", std::move(ego)},
          {"agents", std::move(agents)}};
}

DatasetRecord record_from_json(const json& j) {
  DatasetRecord r;
  r.driving_case.timestamp = j.at("t").get<double>();
  r.case_label = label_from_json(j.at("case_label"));
  for (const auto& s : j.at("ego")) r.driving_case.ego_history.push_back(state_from_json(s, -1));
  for (const auto& a : j.at("agents")) {
    AgentHistory hist;
    hist.agent_id = a.at("id").get<AgentId>();
    for (const auto& s : a.at("history")) hist.states.push_back(state_from_json(s, hist.agent_id));
    if (hist.states.empty()) throw DomainError("agent history is empty");
    FutureTrajectory fut;
    fut.agent_id = hist.agent_id;
    fut.origin = hist.current().position;
    fut.origin_heading = hist.current().heading;
    for (const auto& p : a.at("future")) {
      fut.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    }
    r.agent_labels.push_back(label_from_json(a.at("label")));
    r.driving_case.agents.push_back(std::move(hist));
    r.futures.push_back(std::move(fut));
  }
  return r;
}

}  // namespace

LabelCounts TrainingDataset::label_counts() const {
  LabelCounts counts{};
  for (const auto& r : records) {
    for (auto label : r.agent_labels) ++counts[index_of(label)];
  }
  return counts;
}

std::size_t TrainingDataset::agent_sample_count() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.futures.size();
  return n;
}

void write_dataset(std::ostream& out, const TrainingDataset& dataset) {
  out << kHeader << '\n';
  for (const auto& r : dataset.records) out << record_to_json(r).dump() << '\n';
}

void write_dataset(const std::filesystem::path& file, const TrainingDataset& dataset) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write dataset to " + file.string());
  write_dataset(out, dataset);
  if (!out) throw IoError("failed writing dataset to " + file.string());
}

TrainingDataset read_dataset(std::istream& in, const std::string& source_name) {
  TrainingDataset ds;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source_name, 1, "missing header");
  ++line_no;
  if (line != kHeader) throw ParseError(source_name, line_no, "expected '" + std::string(kHeader) + "'");
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      ds.records.push_back(record_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(source_name, line_no, e.what());
    } catch (const DomainError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  return ds;
}

TrainingDataset read_dataset(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open dataset " + file.string());
  return read_dataset(in, file.string());
}

void write_label_histogram(const std::filesystem::path& file, const LabelCounts& counts) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write histogram to " + file.string());
  out << kHeader << '\n' << "label,count\n";
  for (auto label : kAllBehaviorLabels) {
    if (counts[index_of(label)] == 0) continue;
    out << to_string(label) << ',' << counts[index_of(label)] << '\n';
  }
}

}  // namespace ltp
