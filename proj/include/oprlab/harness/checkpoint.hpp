#pragma once

#include <iosfwd>
#include <string>

#include "oprlab/agent/agent.hpp"

namespace oprlab::harness {

// Versioned, self-describing text checkpoint: layer shapes plus base-10
// floats at full round-trip precision (17 significant digits), so a
// save/load cycle reproduces bit-equal forward passes.
//
// A checkpoint always carries the agent parameters and optimizer moments.
// The trainer appends its full training state (buffer, envs, rng streams)
// in an optional trailing section so interrupted runs resume exactly.

constexpr const char* kCheckpointMagic = "oprlab-checkpoint";
constexpr int kCheckpointVersion = 1;

void write_mlp(std::ostream& os, const numkit::MlpParams& mlp);
numkit::MlpParams read_mlp(std::istream& is);

void write_moments(std::ostream& os, const numkit::MlpGrads& g);
void read_moments_into(std::istream& is, numkit::MlpGrads& g);

void write_adam(std::ostream& os, const char* name, const numkit::AdamState& s);
void read_adam_into(std::istream& is, const char* name, numkit::AdamState& s);

// Standalone agent+optimizer checkpoint (no trainer section).
void save_checkpoint(const std::string& path, const agent::AgentParams& params,
                     const agent::AgentOptimizer& opt);

// Loads agent and optimizer, validating version and shapes; throws IoError
// naming the offending field and leaves the outputs untouched on failure.
// Returns the stream positioned at the trainer section flag.
void load_checkpoint(const std::string& path, agent::AgentParams& params,
                     agent::AgentOptimizer& opt);

// Stream-level pieces used by the trainer's full-state checkpoints.
void write_checkpoint_header(std::ostream& os);
void read_checkpoint_header(std::istream& is);
void write_agent_section(std::ostream& os, const agent::AgentParams& params,
                         const agent::AgentOptimizer& opt);
void read_agent_section(std::istream& is, agent::AgentParams& params,
                        agent::AgentOptimizer& opt);

}  // namespace oprlab::harness
