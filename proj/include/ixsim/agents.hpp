#pragma once

#include <memory>
#include <string>

#include "ixsim/env.hpp"
#include "ixsim/nn.hpp"

namespace ixsim {

/// A driving agent under evaluation. Rule-based agents read the ground-truth
/// world; the TD3 agent reads only the observation vector.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual Action act(const Env& env) = 0;
  virtual std::string label() const = 0;
};

/// Frozen TD3 actor evaluated deterministically (no exploration noise).
class Td3Agent : public Agent {
 public:
  explicit Td3Agent(PolicyNet actor, std::string label = "td3");
  static std::unique_ptr<Td3Agent> from_file(const std::string& path);
  Action act(const Env& env) override;
  std::string label() const override { return label_; }

 private:
  PolicyNet actor_;
  mutable PolicyNet::Workspace ws_;
  std::string label_;
};

/// IDM car following along the ego route, emitted as the equivalent
/// target-speed command.
class IdmAgent : public Agent {
 public:
  explicit IdmAgent(IdmParams params = {}) : params_(params) {}
  Action act(const Env& env) override;
  std::string label() const override { return "idm"; }

 private:
  IdmParams params_;
};

/// Cruise at the speed cap; full braking while the AEB detection box is
/// occupied, emitted as the equivalent target-speed command.
class AebAgent : public Agent {
 public:
  explicit AebAgent(AebParams params = {}) : params_(params) {}
  Action act(const Env& env) override;
  std::string label() const override { return "aeb"; }

 private:
  AebParams params_;
};

/// Uniform random actions; the reference floor for learning curves.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(uint64_t seed) : rng_(seed) {}
  Action act(const Env& env) override;
  std::string label() const override { return "random"; }

 private:
  Rng rng_;
};

/// Encode a target speed in [0, 9] m/s as an action pair.
Action action_for_target_speed(double v_target);

/// Parse "td3:<path>" | "idm" | "aeb" | "random[:seed]".
std::unique_ptr<Agent> make_agent(const std::string& spec, const IdmParams& idm,
                                  const AebParams& aeb);

}  // namespace ixsim
