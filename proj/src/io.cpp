#include "edmlab/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "edmlab/errors.hpp"

namespace edmlab::io {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(path + ": cannot open for reading");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
}

// Field accessors that name the file and field in every failure.
const json& require(const json& j, const std::string& path, const char* field) {
  if (!j.contains(field))
    throw InvalidArgument(path + ": missing field \"" + field + "\"");
  return j.at(field);
}

double number(const json& j, const std::string& path, const std::string& field) {
  if (!j.is_number()) throw InvalidArgument(path + ": field \"" + field + "\" must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path, const std::string& field) {
  if (!j.is_number_integer())
    throw InvalidArgument(path + ": field \"" + field + "\" must be an integer");
  return j.get<int>();
}

Eigen::VectorXd vector(const json& j, const std::string& path, const std::string& field) {
  if (!j.is_array()) throw InvalidArgument(path + ": field \"" + field + "\" must be an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<int>(i)) = number(j[i], path, field + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd matrix(const json& j, const std::string& path, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw InvalidArgument(path + ": field \"" + field + "\" must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0)
    throw InvalidArgument(path + ": field \"" + field + "\" rows must be non-empty arrays");
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols)
      throw InvalidArgument(path + ": field \"" + row_field + "\" has inconsistent length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<int>(r), static_cast<int>(c)) =
          number(j[r][c], path, row_field + "[" + std::to_string(c) + "]");
  }
  return m;
}

json double_map_json(const std::map<std::string, double>& m) {
  json out = json::object();
  for (const auto& [key, value] : m) out[key] = value;
  return out;
}

}  // namespace

mdp::TabularMdp load_mdp(const std::string& path) {
  const json j = load_json(path);
  mdp::TabularMdp m;
  m.n_states = integer(require(j, path, "n_states"), path, "n_states");
  m.n_actions = integer(require(j, path, "n_actions"), path, "n_actions");
  if (m.n_states <= 0 || m.n_actions <= 0)
    throw InvalidArgument(path + ": n_states and n_actions must be positive");

  const json& t = require(j, path, "transitions");
  if (!t.is_array() || static_cast<int>(t.size()) != m.n_states)
    throw InvalidArgument(path + ": \"transitions\" must be an array of n_states entries");
  m.transitions.assign(static_cast<std::size_t>(m.n_actions),
                       Eigen::MatrixXd::Zero(m.n_states, m.n_states));
  for (int s = 0; s < m.n_states; ++s) {
    const std::string field = "transitions[" + std::to_string(s) + "]";
    const Eigen::MatrixXd per_action = matrix(t[s], path, field);  // rows: actions
    if (per_action.rows() != m.n_actions || per_action.cols() != m.n_states)
      throw InvalidArgument(path + ": \"" + field + "\" must be n_actions x n_states");
    for (int a = 0; a < m.n_actions; ++a) m.transitions[a].row(s) = per_action.row(a);
  }

  m.initial = vector(require(j, path, "initial"), path, "initial");
  if (j.contains("gamma")) m.gamma = number(j.at("gamma"), path, "gamma");
  try {
    mdp::validate_mdp(m);
  } catch (const Error& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return m;
}

policies::SoftmaxPolicy load_policy(const std::string& path) {
  const json j = load_json(path);
  Eigen::MatrixXd logits = matrix(require(j, path, "logits"), path, "logits");
  Eigen::VectorXd gauge = Eigen::VectorXd::Zero(logits.rows());
  if (j.contains("gauge")) {
    gauge = vector(j.at("gauge"), path, "gauge");
    if (gauge.size() != logits.rows())
      throw InvalidArgument(path + ": \"gauge\" length must equal the number of logit rows");
  }
  if (!logits.allFinite() || !gauge.allFinite())
    throw InvalidArgument(path + ": logits and gauge must be finite");
  return policies::SoftmaxPolicy(std::move(logits), std::move(gauge));
}

policies::CoupledPolicy load_coupled_policy(const std::string& path) {
  const json j = load_json(path);
  policies::CoupledPolicy c;
  c.theta = number(require(j, path, "theta"), path, "theta");
  c.k = number(require(j, path, "k"), path, "k");
  return c;
}

sampler::SurrogateEnergy load_energy(const std::string& path) {
  const json j = load_json(path);
  sampler::SurrogateEnergy e;
  e.centers = vector(require(j, path, "centers"), path, "centers");
  e.weights = vector(require(j, path, "weights"), path, "weights");
  e.bandwidth = number(require(j, path, "bandwidth"), path, "bandwidth");
  e.lo = number(require(j, path, "lo"), path, "lo");
  e.hi = number(require(j, path, "hi"), path, "hi");
  try {
    e.validate();
  } catch (const Error& err) {
    throw InvalidArgument(path + ": " + err.what());
  }
  return e;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string state_dist_json(const mdp::StateDist& d) {
  json arr = json::array();
  for (int i = 0; i < d.probs.size(); ++i) arr.push_back(d.probs(i));
  return arr.dump() + "\n";
}

std::string check_report_json(const std::vector<counterexamples::CheckResult>& checks) {
  json list = json::array();
  for (const auto& c : checks) {
    json entry;
    entry["name"] = c.name;
    entry["passed"] = c.passed;
    entry["observed"] = double_map_json(c.observed);
    entry["expected"] = double_map_json(c.expected);
    entry["tolerance"] = c.tolerance;
    list.push_back(entry);
  }
  json report;
  report["checks"] = list;
  return report.dump(2) + "\n";
}

std::string trace_csv(const objectives::DescentTrace& trace) {
  std::ostringstream out;
  out << "step,theta,bc_loss,edm_loss,grad_total\n";
  for (const auto& row : trace.rows) {
    out << row.step << ',' << format_double(row.theta) << ',' << format_double(row.bc_loss)
        << ',' << format_double(row.edm_loss) << ',' << format_double(row.grad_total) << '\n';
  }
  return out.str();
}

std::string trajectories_jsonl(const std::vector<mdp::Trajectory>& trajectories) {
  std::ostringstream out;
  for (const auto& traj : trajectories) {
    json steps = json::array();
    for (const auto& [s, a] : traj.steps) steps.push_back(json::array({s, a}));
    json line;
    line["steps"] = steps;
    out << line.dump() << '\n';
  }
  return out.str();
}

std::string sample_batch_jsonl(const sampler::SampleBatch& batch) {
  std::ostringstream out;
  for (double v : batch.values) out << format_double(v) << '\n';
  return out.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument(path + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw Error(path + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(path + ": rename failed: " + ec.message());
  }
}

}  // namespace edmlab::io
