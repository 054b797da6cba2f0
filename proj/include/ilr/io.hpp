#pragma once

#include "ilr/chain.hpp"
#include "ilr/imitation.hpp"
#include "ilr/mdp.hpp"
#include "ilr/verification.hpp"

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>

namespace ilr {

/// Malformed or inconsistent file contents.
class FormatError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

// MDP documents: {num_states, num_actions, transitions[s][a][s'], rewards[s][a], initial_state}.
std::string mdp_to_json(const FiniteMdp& mdp);
/// Parses and validates; throws FormatError on malformed input and
/// std::invalid_argument listing every violation on an invalid MDP.
FiniteMdp mdp_from_json(const std::string& text);

// Dataset documents: {seed, N, num_states, num_actions, trajectory[[s,a],...],
// support[[s,a],...], histogram[s][a]}. support and histogram are optional on
// input and cross-checked against the trajectory when present.
std::string dataset_to_json(const ExpertDataset& dataset);
ExpertDataset dataset_from_json(const std::string& text);

std::string policy_to_json(const Policy& policy);
std::string mixing_to_json(const MixingProfile& profile);

std::string report_to_json(const VerificationReport& report);
/// Header trial,seed,measured,bound,satisfied followed by one row per record.
std::string records_to_csv(std::span<const TrialRecord> records);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ilr
