#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ixsim/nn.hpp"

using namespace ixsim;

namespace {

/// Loss = sum(out .* G) for a fixed random G; returns loss and fills d_out.
double weighted_sum_loss(const Mat& out, const Mat& g, Mat& d_out) {
  d_out = g;
  double loss = 0.0;
  for (size_t i = 0; i < out.a.size(); ++i) loss += out.a[i] * g.a[i];
  return loss;
}

double eval_loss(const PolicyNet& net, const Mat& obs, const Mat* act, const Mat& g) {
  PolicyNet::Workspace ws;
  Mat out;
  net.forward(obs, act, out, ws);
  double loss = 0.0;
  for (size_t i = 0; i < out.a.size(); ++i) loss += out.a[i] * g.a[i];
  return loss;
}

struct GradCheckResult {
  double max_rel_err = 0.0;
  int checked = 0;
};

GradCheckResult grad_check(PolicyNet& net, const Mat& obs, const Mat* act, const Mat& g) {
  PolicyNet::Workspace ws;
  Mat out, d_out;
  net.forward(obs, act, out, ws);
  weighted_sum_loss(out, g, d_out);
  net.zero_grad();
  net.backward(obs, act, d_out, ws);

  GradCheckResult res;
  const double h = 1e-4;
  for (Linear* layer : net.layers()) {
    auto probe = [&](std::vector<double>& params, const std::vector<double>& grads) {
      for (size_t k = 0; k < params.size(); ++k) {
        const double saved = params[k];
        params[k] = saved + h;
        const double up = eval_loss(net, obs, act, g);
        params[k] = saved - h;
        const double down = eval_loss(net, obs, act, g);
        params[k] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double denom = std::max({1.0, std::abs(fd), std::abs(grads[k])});
        res.max_rel_err = std::max(res.max_rel_err, std::abs(fd - grads[k]) / denom);
        ++res.checked;
      }
    };
    probe(layer->w, layer->gw);
    probe(layer->b, layer->gb);
  }
  return res;
}

Mat random_mat(int r, int c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Mat m(r, c);
  for (auto& v : m.a) v = rng.uniform(lo, hi);
  return m;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("zeroed actor emits sigmoid(0) = 0.5 per component, deterministically") {
  Rng rng(1);
  PolicyNet actor(4, 30, 0, 2, 8, rng);
  for (Linear* l : actor.layers()) {
    std::fill(l->w.begin(), l->w.end(), 0.0);
    std::fill(l->b.begin(), l->b.end(), 0.0);
  }
  Mat obs = random_mat(3, 34, rng);
  PolicyNet::Workspace ws;
  Mat out1, out2;
  actor.forward(obs, nullptr, out1, ws);
  actor.forward(obs, nullptr, out2, ws);
  for (double v : out1.a) CHECK(v == 0.5);
  CHECK(out1.a == out2.a);
}

TEST_CASE("forward rejects malformed inputs") {
  Rng rng(2);
  PolicyNet actor(4, 30, 0, 2, 8, rng);
  PolicyNet::Workspace ws;
  Mat out;
  Mat bad = random_mat(1, 33, rng);
  CHECK_THROWS_AS(actor.forward(bad, nullptr, out, ws), std::invalid_argument);
  Mat good = random_mat(1, 34, rng);
  Mat act = random_mat(1, 2, rng);
  CHECK_THROWS_AS(actor.forward(good, &act, out, ws), std::invalid_argument);
}

TEST_CASE("single linear layer gradient equals the analytic outer product") {
  Rng rng(3);
  Linear layer;
  layer.init(5, 3, rng);
  Mat x = random_mat(4, 5, rng);
  Mat y;
  layer.forward(x, y);
  Mat dy = random_mat(4, 3, rng);
  layer.zero_grad();
  Mat dx;
  layer.backward(x, dy, &dx);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 3; ++j) {
      double expected = 0.0;
      for (int b = 0; b < 4; ++b) expected += x.at(b, i) * dy.at(b, j);
      CHECK(layer.gw[i * 3 + j] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  for (int j = 0; j < 3; ++j) {
    double expected = 0.0;
    for (int b = 0; b < 4; ++b) expected += dy.at(b, j);
    CHECK(layer.gb[j] == doctest::Approx(expected).epsilon(1e-12));
  }
  // dx = dy * W^T
  for (int b = 0; b < 4; ++b) {
    for (int i = 0; i < 5; ++i) {
      double expected = 0.0;
      for (int j = 0; j < 3; ++j) expected += dy.at(b, j) * layer.w[i * 3 + j];
      CHECK(dx.at(b, i) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("actor and critic gradients match central finite differences") {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    Rng rng(100 + seed);
    PolicyNet actor(4, 30, 0, 2, 6, rng);
    Mat obs = random_mat(3, 34, rng);
    Mat g_actor = random_mat(3, 2, rng);
    const auto res_a = grad_check(actor, obs, nullptr, g_actor);
    CHECK(res_a.checked > 0);
    CHECK(res_a.max_rel_err < 1e-4);

    PolicyNet critic(4, 30, 2, 1, 6, rng);
    Mat act = random_mat(3, 2, rng, 0.0, 1.0);
    Mat g_critic = random_mat(3, 1, rng);
    const auto res_c = grad_check(critic, obs, &act, g_critic);
    CHECK(res_c.max_rel_err < 1e-4);
  }
}

TEST_CASE("critic action-input gradient matches finite differences") {
  Rng rng(42);
  PolicyNet critic(4, 30, 2, 1, 8, rng);
  Mat obs = random_mat(2, 34, rng);
  Mat act = random_mat(2, 2, rng, 0.1, 0.9);
  Mat g = random_mat(2, 1, rng);

  PolicyNet::Workspace ws;
  Mat out, d_out;
  critic.forward(obs, &act, out, ws);
  weighted_sum_loss(out, g, d_out);
  critic.zero_grad();
  Mat d_action;
  critic.backward(obs, &act, d_out, ws, &d_action);

  const double h = 1e-5;
  for (int i = 0; i < act.rows; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double saved = act.at(i, j);
      act.at(i, j) = saved + h;
      const double up = eval_loss(critic, obs, &act, g);
      act.at(i, j) = saved - h;
      const double down = eval_loss(critic, obs, &act, g);
      act.at(i, j) = saved;
      const double fd = (up - down) / (2.0 * h);
      CHECK(d_action.at(i, j) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("doubling a hidden weight moves the output like its directional derivative") {
  Rng rng(7);
  PolicyNet critic(4, 30, 2, 1, 8, rng);
  Mat obs = random_mat(1, 34, rng);
  Mat act = random_mat(1, 2, rng, 0.0, 1.0);
  Mat g(1, 1);
  g.at(0, 0) = 1.0;

  PolicyNet::Workspace ws;
  Mat out, d_out;
  critic.forward(obs, &act, out, ws);
  weighted_sum_loss(out, g, d_out);
  critic.zero_grad();
  critic.backward(obs, &act, d_out, ws);

  // pick one mid-net weight; doubling it perturbs the output by roughly
  // gradient * delta for small weights
  Linear& layer = critic.head1;
  const size_t idx = 17;
  const double w0 = layer.w[idx];
  const double grad = layer.gw[idx];
  layer.w[idx] = 2.0 * w0;
  const double moved = eval_loss(critic, obs, &act, g);
  layer.w[idx] = w0;
  const double base = eval_loss(critic, obs, &act, g);
  CHECK(moved - base == doctest::Approx(grad * w0).epsilon(0.05));
}

TEST_CASE("actor outputs stay in [0,1]^2 for any parameters") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    PolicyNet actor(4, 30, 0, 2, 8, rng);
    for (Linear* l : actor.layers()) {
      for (auto& w : l->w) w *= rng.uniform(-50.0, 50.0);
      for (auto& b : l->b) b *= rng.uniform(-50.0, 50.0);
    }
    Mat obs = random_mat(4, 34, rng, -100.0, 100.0);
    PolicyNet::Workspace ws;
    Mat out;
    actor.forward(obs, nullptr, out, ws);
    for (double v : out.a) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("save/load round-trips parameters exactly") {
  Rng rng(13);
  PolicyNet actor(4, 30, 0, 2, 64, rng);
  const std::string path = "/tmp/ixsim_nn_roundtrip.bin";
  save_net(actor, path);
  const PolicyNet loaded = load_net(path);
  auto a = actor.layers();
  auto b = loaded.layers();
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i]->w == b[i]->w);
    CHECK(a[i]->b == b[i]->b);
  }
  CHECK_THROWS(load_net("/tmp/ixsim_definitely_missing.bin"));
}

}  // TEST_SUITE
