#include "ixsim/td3.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ixsim {

void ReplayBuffer::push(const Transition& t) {
  if (data_.size() < capacity_) {
    data_.push_back(t);
  } else {
    data_[head_] = t;  // strict FIFO eviction
    head_ = (head_ + 1) % capacity_;
  }
}

void ReplayBuffer::sample(size_t batch, Rng& rng, std::vector<const Transition*>& out) const {
  out.resize(batch);
  for (size_t i = 0; i < batch; ++i) {
    out[i] = &data_[rng.uniform_int(data_.size())];
  }
}

namespace {
constexpr uint64_t kInitStream = 0x11;

Mat obs_batch(const std::vector<const Transition*>& batch, bool next) {
  Mat m(static_cast<int>(batch.size()), kObsDim);
  for (size_t i = 0; i < batch.size(); ++i) {
    const Observation& o = next ? batch[i]->next_obs : batch[i]->obs;
    std::copy(o.begin(), o.end(), m.row(static_cast<int>(i)));
  }
  return m;
}
}  // namespace

Td3::Td3(const Td3Config& cfg, uint64_t seed) : cfg_(cfg) {
  Rng rng(mix_seed(seed, kInitStream));
  actor_ = PolicyNet(kEgoBlockDim, kNumSocialSlots * kSocialBlockDim, 0, 2, cfg.hidden, rng);
  critic1_ = PolicyNet(kEgoBlockDim, kNumSocialSlots * kSocialBlockDim, 2, 1, cfg.hidden, rng);
  critic2_ = PolicyNet(kEgoBlockDim, kNumSocialSlots * kSocialBlockDim, 2, 1, cfg.hidden, rng);
  actor_t_ = actor_;
  critic1_t_ = critic1_;
  critic2_t_ = critic2_;
}

Action Td3::act(const Observation& obs) const {
  Mat in(1, kObsDim);
  std::copy(obs.begin(), obs.end(), in.row(0));
  Mat out;
  actor_.forward(in, nullptr, out, ws_actor_);
  return Action{out.at(0, 0), out.at(0, 1)};
}

Action Td3::act_noisy(const Observation& obs, Rng& rng) const {
  Action a = act(obs);
  a.a0 = std::clamp(a.a0 + rng.gaussian(0.0, cfg_.expl_noise), 0.0, 1.0);
  a.a1 = std::clamp(a.a1 + rng.gaussian(0.0, cfg_.expl_noise), 0.0, 1.0);
  return a;
}

UpdateDiagnostics Td3::update(const ReplayBuffer& buffer, Rng& rng) {
  const int B = cfg_.batch_size;
  if (buffer.size() < static_cast<size_t>(B)) {
    throw std::logic_error("Td3::update: buffer smaller than one batch");
  }
  std::vector<const Transition*> batch;
  buffer.sample(static_cast<size_t>(B), rng, batch);

  const Mat obs = obs_batch(batch, false);
  const Mat next_obs = obs_batch(batch, true);
  Mat actions(B, 2);
  for (int i = 0; i < B; ++i) {
    actions.at(i, 0) = batch[i]->action.a0;
    actions.at(i, 1) = batch[i]->action.a1;
  }

  // target actions with clipped smoothing noise
  Mat next_actions;
  actor_t_.forward(next_obs, nullptr, next_actions, ws_t_);
  for (int i = 0; i < B; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double eps = std::clamp(rng.gaussian(0.0, cfg_.smooth_noise), -cfg_.noise_clip,
                                    cfg_.noise_clip);
      next_actions.at(i, j) = std::clamp(next_actions.at(i, j) + eps, 0.0, 1.0);
    }
  }

  Mat q1_t, q2_t;
  critic1_t_.forward(next_obs, &next_actions, q1_t, ws_t_);
  critic2_t_.forward(next_obs, &next_actions, q2_t, ws_t_);
  std::vector<double> target(B);
  for (int i = 0; i < B; ++i) {
    const double min_q = std::min(q1_t.at(i, 0), q2_t.at(i, 0));
    target[i] =
        batch[i]->reward + cfg_.gamma * (batch[i]->done ? 0.0 : 1.0) * min_q;
  }

  UpdateDiagnostics diag;
  const AdamParams adam{cfg_.lr, 0.9, 0.999, 1e-8};

  // critic regression toward the shared target
  auto fit_critic = [&](PolicyNet& critic, PolicyNet::Workspace& ws, double& loss_out) {
    Mat q;
    critic.forward(obs, &actions, q, ws);
    Mat d(B, 1);
    double loss = 0.0;
    for (int i = 0; i < B; ++i) {
      const double err = q.at(i, 0) - target[i];
      loss += err * err;
      d.at(i, 0) = 2.0 * err / B;  // d(mse)/dq
    }
    loss_out = loss / B;
    critic.zero_grad();
    critic.backward(obs, &actions, d, ws);
    critic.adam_step(adam, ++critic_step_);
  };
  // one shared Adam clock keeps the twin critics on the same schedule
  const int64_t step_before = critic_step_;
  fit_critic(critic1_, ws_c1_, diag.critic1_loss);
  critic_step_ = step_before;
  fit_critic(critic2_, ws_c2_, diag.critic2_loss);

  ++update_count_;
  if (update_count_ % cfg_.policy_delay == 0) {
    // actor ascends Q1(s, pi(s))
    Mat pi;
    actor_.forward(obs, nullptr, pi, ws_actor_);
    Mat q;
    critic1_.forward(obs, &pi, q, ws_c1_);
    double mean_q = 0.0;
    for (int i = 0; i < B; ++i) mean_q += q.at(i, 0);
    diag.actor_objective = mean_q / B;

    Mat dq(B, 1);
    for (int i = 0; i < B; ++i) dq.at(i, 0) = -1.0 / B;  // maximize mean Q
    Mat d_action;
    critic1_.zero_grad();  // gradients through the critic are discarded
    critic1_.backward(obs, &pi, dq, ws_c1_, &d_action);
    critic1_.zero_grad();
    actor_.zero_grad();
    actor_.backward(obs, nullptr, d_action, ws_actor_);
    actor_.adam_step(adam, ++actor_step_);
    diag.actor_updated = true;

    actor_t_.blend_from(actor_, cfg_.polyak);
    critic1_t_.blend_from(critic1_, cfg_.polyak);
    critic2_t_.blend_from(critic2_, cfg_.polyak);
  }
  return diag;
}

TrainResult train_td3(Env& env, Td3& td3, const Td3Config& cfg, int episodes, uint64_t seed,
                      const TrainHooks& hooks) {
  Rng expl_rng(mix_seed(seed, 0x22));
  Rng replay_rng(mix_seed(seed, 0x33));
  ReplayBuffer buffer(cfg.buffer_capacity);

  TrainResult result;
  std::deque<double> window_returns;
  std::deque<double> window_success;
  double window_return_sum = 0.0;
  double window_success_sum = 0.0;
  int total_steps = 0;

  for (int ep = 0; ep < episodes; ++ep) {
    Observation obs = env.reset(mix_seed(seed, 0x1000 + static_cast<uint64_t>(ep)));
    double ep_return = 0.0;
    Outcome outcome = Outcome::Running;
    while (true) {
      Action a;
      if (total_steps < cfg.warmup_steps) {
        a = Action{expl_rng.uniform(), expl_rng.uniform()};
      } else {
        a = td3.act_noisy(obs, expl_rng);
      }
      const StepOutput out = env.step(a);
      buffer.push(Transition{obs, a, out.reward, out.observation, out.done});
      obs = out.observation;
      ep_return += out.reward;
      ++total_steps;
      if (total_steps > cfg.warmup_steps && total_steps % cfg.update_every == 0 &&
          buffer.size() >= static_cast<size_t>(cfg.batch_size)) {
        td3.update(buffer, replay_rng);
      }
      if (out.done) {
        outcome = out.outcome;
        break;
      }
    }

    CurvePoint point;
    point.episode = ep;
    point.episode_return = ep_return;
    point.success = outcome == Outcome::Success;
    window_returns.push_back(ep_return);
    window_return_sum += ep_return;
    window_success.push_back(point.success ? 1.0 : 0.0);
    window_success_sum += point.success ? 1.0 : 0.0;
    if (static_cast<int>(window_returns.size()) > cfg.curve_window) {
      window_return_sum -= window_returns.front();
      window_returns.pop_front();
      window_success_sum -= window_success.front();
      window_success.pop_front();
    }
    point.moving_return = window_return_sum / static_cast<double>(window_returns.size());
    point.moving_success = window_success_sum / static_cast<double>(window_success.size());
    result.curve.push_back(point);

    if (hooks.on_episode && !hooks.on_episode(point)) break;
    if (cfg.success_stop > 0.0 &&
        static_cast<int>(window_success.size()) >= std::min(cfg.curve_window, episodes) &&
        point.moving_success >= cfg.success_stop) {
      break;
    }
  }
  result.total_env_steps = total_steps;
  return result;
}

void write_curve_csv(const LearningCurve& curve, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write curve file: " + path);
  std::fprintf(f, "episode,return,success,moving_return,moving_success\n");
  for (const auto& p : curve) {
    std::fprintf(f, "%d,%.17g,%d,%.17g,%.17g\n", p.episode, p.episode_return, p.success ? 1 : 0,
                 p.moving_return, p.moving_success);
  }
  std::fclose(f);
}

}  // namespace ixsim
