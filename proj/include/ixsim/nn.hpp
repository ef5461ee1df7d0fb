#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ixsim/rng.hpp"

namespace ixsim {

/// Row-major batch matrix.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  void resize(int r, int c) {
    rows = r;
    cols = c;
    a.assign(static_cast<size_t>(r) * c, 0.0);
  }
  double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }
  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

struct AdamParams {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Fully-connected layer with uniform fan-in init, gradient buffers, and
/// Adam state.
struct Linear {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // [in][out]
  std::vector<double> b;
  std::vector<double> gw, gb;
  std::vector<double> mw, vw, mb, vb;

  void init(int in_dim, int out_dim, Rng& rng);

  /// y[B,out] = x[B,in] * w + b
  void forward(const Mat& x, Mat& y) const;

  /// Accumulates gw/gb from dy; writes dx when non-null.
  void backward(const Mat& x, const Mat& dy, Mat* dx);

  void zero_grad();
  void adam_step(const AdamParams& p, int64_t t);

  size_t param_count() const { return w.size() + b.size(); }
};

void relu_forward(Mat& x);
/// dx masked in place by the stored activations (post-relu values).
void relu_backward(const Mat& activated, Mat& d);
void sigmoid_forward(Mat& x);
void sigmoid_backward(const Mat& activated, Mat& d);

/// Encoder network of the intersection agent: the 4-dim ego block and the
/// 30-dim social block each pass through two hidden layers, the results are
/// concatenated (plus the action, for critics) and fed to the head.
class PolicyNet {
 public:
  /// action_dim 0 builds an actor (sigmoid [0,1] outputs), otherwise a
  /// critic taking the action into its head.
  PolicyNet() = default;
  PolicyNet(int obs_ego, int obs_social, int action_dim, int out_dim, int hidden, Rng& rng);

  struct Workspace {
    Mat ego_in, soc_in;
    Mat e1, e2, s1, s2;
    Mat cat, h1, out;
    Mat d_e1, d_e2, d_s1, d_s2, d_cat, d_h1;
    Mat d_ego_in, d_soc_in;
  };

  /// `action` must be non-null iff the net is a critic.
  void forward(const Mat& obs, const Mat* action, Mat& out, Workspace& ws) const;

  /// Accumulates parameter gradients; optionally returns d(loss)/d(action).
  void backward(const Mat& obs, const Mat* action, const Mat& d_out, Workspace& ws,
                Mat* d_action = nullptr);

  void zero_grad();
  void adam_step(const AdamParams& p, int64_t t);

  /// target <- (1 - tau) * target + tau * online, applied to this net.
  void blend_from(const PolicyNet& online, double tau);

  std::vector<Linear*> layers();
  std::vector<const Linear*> layers() const;
  size_t param_count() const;

  int obs_ego_dim() const { return obs_ego_; }
  int obs_social_dim() const { return obs_social_; }
  int action_dim() const { return action_dim_; }
  int out_dim() const { return out_dim_; }
  int hidden_dim() const { return hidden_; }
  bool is_actor() const { return action_dim_ == 0; }

  Linear ego1, ego2, soc1, soc2, head1, head2;

 private:
  int obs_ego_ = 0;
  int obs_social_ = 0;
  int action_dim_ = 0;
  int out_dim_ = 0;
  int hidden_ = 0;
};

/// Flat little-endian f64 parameter file: magic, version, layer shapes,
/// then weights and biases in declaration order.
void save_net(const PolicyNet& net, const std::string& path);
PolicyNet load_net(const std::string& path);

}  // namespace ixsim
