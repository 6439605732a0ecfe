#pragma once

#include <string>
#include <vector>

#include "edmlab/counterexamples.hpp"
#include "edmlab/mdp.hpp"
#include "edmlab/objectives.hpp"
#include "edmlab/policies.hpp"
#include "edmlab/sampler.hpp"

namespace edmlab::io {

// Loaders validate as they parse and throw InvalidArgument with the file
// path and offending field named, so the CLI can map them to usage errors.
//
// File formats:
//   MDP:     {"n_states": int, "n_actions": int,
//             "transitions": [[[real]]] indexed [s][a][s'],
//             "initial": [real], "gamma": real (optional, default 0.99)}
//   policy:  {"logits": [[real]], "gauge": [real] (optional, default zeros)}
//   coupled: {"theta": real, "k": real}
//   energy:  {"centers": [real], "weights": [real], "bandwidth": real,
//             "lo": real, "hi": real}
mdp::TabularMdp load_mdp(const std::string& path);
policies::SoftmaxPolicy load_policy(const std::string& path);
policies::CoupledPolicy load_coupled_policy(const std::string& path);
sampler::SurrogateEnergy load_energy(const std::string& path);

// Serializers. All output is deterministic for identical inputs.
std::string state_dist_json(const mdp::StateDist& d);  // plain JSON array
std::string check_report_json(const std::vector<counterexamples::CheckResult>& checks);
std::string trace_csv(const objectives::DescentTrace& trace);  // header step,theta,bc_loss,edm_loss,grad_total
std::string trajectories_jsonl(const std::vector<mdp::Trajectory>& trajectories);
std::string sample_batch_jsonl(const sampler::SampleBatch& batch);  // one real per line

// Round-trippable shortest decimal representation of a double.
std::string format_double(double v);

// Write content to path via a temporary file in the same directory followed
// by an atomic rename, so readers never observe a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace edmlab::io
