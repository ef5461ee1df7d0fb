#include "ixsim/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

namespace ixsim {

void Linear::init(int in_dim, int out_dim, Rng& rng) {
  in = in_dim;
  out = out_dim;
  w.resize(static_cast<size_t>(in) * out);
  b.assign(out, 0.0);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  for (auto& x : w) x = rng.uniform(-bound, bound);
  for (auto& x : b) x = rng.uniform(-bound, bound);
  gw.assign(w.size(), 0.0);
  gb.assign(b.size(), 0.0);
  mw.assign(w.size(), 0.0);
  vw.assign(w.size(), 0.0);
  mb.assign(b.size(), 0.0);
  vb.assign(b.size(), 0.0);
}

void Linear::forward(const Mat& x, Mat& y) const {
  y.resize(x.rows, out);
  for (int i = 0; i < x.rows; ++i) {
    const double* xi = x.row(i);
    double* yi = y.row(i);
    std::memcpy(yi, b.data(), sizeof(double) * out);
    for (int k = 0; k < in; ++k) {
      const double xv = xi[k];
      const double* wk = w.data() + static_cast<size_t>(k) * out;
      for (int j = 0; j < out; ++j) {
        yi[j] += xv * wk[j];
      }
    }
  }
}

void Linear::backward(const Mat& x, const Mat& dy, Mat* dx) {
  for (int i = 0; i < x.rows; ++i) {
    const double* xi = x.row(i);
    const double* di = dy.row(i);
    for (int k = 0; k < in; ++k) {
      const double xv = xi[k];
      double* gk = gw.data() + static_cast<size_t>(k) * out;
      for (int j = 0; j < out; ++j) {
        gk[j] += xv * di[j];
      }
    }
    for (int j = 0; j < out; ++j) {
      gb[j] += di[j];
    }
  }
  if (dx) {
    dx->resize(x.rows, in);
    for (int i = 0; i < x.rows; ++i) {
      const double* di = dy.row(i);
      double* dxi = dx->row(i);
      for (int k = 0; k < in; ++k) {
        const double* wk = w.data() + static_cast<size_t>(k) * out;
        double acc = 0.0;
        for (int j = 0; j < out; ++j) {
          acc += wk[j] * di[j];
        }
        dxi[k] = acc;
      }
    }
  }
}

void Linear::zero_grad() {
  std::fill(gw.begin(), gw.end(), 0.0);
  std::fill(gb.begin(), gb.end(), 0.0);
}

namespace {
void adam_update(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                 std::vector<double>& v, const AdamParams& cfg, int64_t t) {
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (size_t i = 0; i < p.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double mh = m[i] / bc1;
    const double vh = v[i] / bc2;
    p[i] -= cfg.lr * mh / (std::sqrt(vh) + cfg.eps);
  }
}
}  // namespace

void Linear::adam_step(const AdamParams& p, int64_t t) {
  adam_update(w, gw, mw, vw, p, t);
  adam_update(b, gb, mb, vb, p, t);
}

void relu_forward(Mat& x) {
  for (auto& v : x.a) v = v > 0.0 ? v : 0.0;
}

void relu_backward(const Mat& activated, Mat& d) {
  for (size_t i = 0; i < d.a.size(); ++i) {
    if (activated.a[i] <= 0.0) d.a[i] = 0.0;
  }
}

void sigmoid_forward(Mat& x) {
  for (auto& v : x.a) v = 1.0 / (1.0 + std::exp(-v));
}

void sigmoid_backward(const Mat& activated, Mat& d) {
  for (size_t i = 0; i < d.a.size(); ++i) {
    d.a[i] *= activated.a[i] * (1.0 - activated.a[i]);
  }
}

PolicyNet::PolicyNet(int obs_ego, int obs_social, int action_dim, int out_dim, int hidden,
                     Rng& rng)
    : obs_ego_(obs_ego),
      obs_social_(obs_social),
      action_dim_(action_dim),
      out_dim_(out_dim),
      hidden_(hidden) {
  ego1.init(obs_ego, hidden, rng);
  ego2.init(hidden, hidden, rng);
  soc1.init(obs_social, hidden, rng);
  soc2.init(hidden, hidden, rng);
  head1.init(2 * hidden + action_dim, hidden, rng);
  head2.init(hidden, out_dim, rng);
}

namespace {
void split_obs(const Mat& obs, int ego_dim, int social_dim, Mat& ego, Mat& soc) {
  ego.resize(obs.rows, ego_dim);
  soc.resize(obs.rows, social_dim);
  for (int i = 0; i < obs.rows; ++i) {
    std::memcpy(ego.row(i), obs.row(i), sizeof(double) * ego_dim);
    std::memcpy(soc.row(i), obs.row(i) + ego_dim, sizeof(double) * social_dim);
  }
}
}  // namespace

void PolicyNet::forward(const Mat& obs, const Mat* action, Mat& out, Workspace& ws) const {
  if (obs.cols != obs_ego_ + obs_social_) {
    throw std::invalid_argument("PolicyNet::forward: observation width " +
                                std::to_string(obs.cols) + ", expected " +
                                std::to_string(obs_ego_ + obs_social_));
  }
  if ((action == nullptr) != is_actor()) {
    throw std::invalid_argument("PolicyNet::forward: action presence mismatch");
  }
  split_obs(obs, obs_ego_, obs_social_, ws.ego_in, ws.soc_in);
  ego1.forward(ws.ego_in, ws.e1);
  relu_forward(ws.e1);
  ego2.forward(ws.e1, ws.e2);
  relu_forward(ws.e2);
  soc1.forward(ws.soc_in, ws.s1);
  relu_forward(ws.s1);
  soc2.forward(ws.s1, ws.s2);
  relu_forward(ws.s2);

  ws.cat.resize(obs.rows, 2 * hidden_ + action_dim_);
  for (int i = 0; i < obs.rows; ++i) {
    double* c = ws.cat.row(i);
    std::memcpy(c, ws.e2.row(i), sizeof(double) * hidden_);
    std::memcpy(c + hidden_, ws.s2.row(i), sizeof(double) * hidden_);
    if (action_dim_ > 0) {
      std::memcpy(c + 2 * hidden_, action->row(i), sizeof(double) * action_dim_);
    }
  }
  head1.forward(ws.cat, ws.h1);
  relu_forward(ws.h1);
  head2.forward(ws.h1, ws.out);
  if (is_actor()) sigmoid_forward(ws.out);
  out = ws.out;
}

void PolicyNet::backward(const Mat& obs, const Mat* action, const Mat& d_out, Workspace& ws,
                         Mat* d_action) {
  (void)obs;
  (void)action;
  Mat d = d_out;
  if (is_actor()) sigmoid_backward(ws.out, d);
  head2.backward(ws.h1, d, &ws.d_h1);
  relu_backward(ws.h1, ws.d_h1);
  head1.backward(ws.cat, ws.d_h1, &ws.d_cat);

  ws.d_e2.resize(d.rows, hidden_);
  ws.d_s2.resize(d.rows, hidden_);
  if (d_action) d_action->resize(d.rows, action_dim_);
  for (int i = 0; i < d.rows; ++i) {
    const double* c = ws.d_cat.row(i);
    std::memcpy(ws.d_e2.row(i), c, sizeof(double) * hidden_);
    std::memcpy(ws.d_s2.row(i), c + hidden_, sizeof(double) * hidden_);
    if (d_action) {
      std::memcpy(d_action->row(i), c + 2 * hidden_, sizeof(double) * action_dim_);
    }
  }
  relu_backward(ws.e2, ws.d_e2);
  ego2.backward(ws.e1, ws.d_e2, &ws.d_e1);
  relu_backward(ws.e1, ws.d_e1);
  ego1.backward(ws.ego_in, ws.d_e1, nullptr);

  relu_backward(ws.s2, ws.d_s2);
  soc2.backward(ws.s1, ws.d_s2, &ws.d_s1);
  relu_backward(ws.s1, ws.d_s1);
  soc1.backward(ws.soc_in, ws.d_s1, nullptr);
}

std::vector<Linear*> PolicyNet::layers() {
  return {&ego1, &ego2, &soc1, &soc2, &head1, &head2};
}

std::vector<const Linear*> PolicyNet::layers() const {
  return {&ego1, &ego2, &soc1, &soc2, &head1, &head2};
}

void PolicyNet::zero_grad() {
  for (Linear* l : layers()) l->zero_grad();
}

void PolicyNet::adam_step(const AdamParams& p, int64_t t) {
  for (Linear* l : layers()) l->adam_step(p, t);
}

void PolicyNet::blend_from(const PolicyNet& online, double tau) {
  auto mine = layers();
  auto theirs = online.layers();
  for (size_t i = 0; i < mine.size(); ++i) {
    for (size_t k = 0; k < mine[i]->w.size(); ++k) {
      mine[i]->w[k] += tau * (theirs[i]->w[k] - mine[i]->w[k]);
    }
    for (size_t k = 0; k < mine[i]->b.size(); ++k) {
      mine[i]->b[k] += tau * (theirs[i]->b[k] - mine[i]->b[k]);
    }
  }
}

size_t PolicyNet::param_count() const {
  size_t n = 0;
  for (const Linear* l : layers()) n += l->param_count();
  return n;
}

namespace {
constexpr char kMagic[8] = {'I', 'X', 'N', 'E', 'T', '0', '0', '1'};

void write_u32(std::FILE* f, uint32_t v) { std::fwrite(&v, sizeof(v), 1, f); }

uint32_t read_u32(std::FILE* f) {
  uint32_t v = 0;
  if (std::fread(&v, sizeof(v), 1, f) != 1) {
    throw std::runtime_error("network file: truncated header");
  }
  return v;
}
}  // namespace

void save_net(const PolicyNet& net, const std::string& path) {
  static_assert(std::endian::native == std::endian::little,
                "parameter files are little-endian");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write network file: " + path);
  std::fwrite(kMagic, sizeof(kMagic), 1, f);
  write_u32(f, static_cast<uint32_t>(net.obs_ego_dim()));
  write_u32(f, static_cast<uint32_t>(net.obs_social_dim()));
  write_u32(f, static_cast<uint32_t>(net.action_dim()));
  write_u32(f, static_cast<uint32_t>(net.out_dim()));
  write_u32(f, static_cast<uint32_t>(net.hidden_dim()));
  const auto layers = net.layers();
  write_u32(f, static_cast<uint32_t>(layers.size()));
  for (const Linear* l : layers) {
    write_u32(f, static_cast<uint32_t>(l->in));
    write_u32(f, static_cast<uint32_t>(l->out));
  }
  for (const Linear* l : layers) {
    std::fwrite(l->w.data(), sizeof(double), l->w.size(), f);
    std::fwrite(l->b.data(), sizeof(double), l->b.size(), f);
  }
  std::fclose(f);
}

PolicyNet load_net(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("cannot open network file: " + path);
  char magic[8];
  if (std::fread(magic, sizeof(magic), 1, f) != 1 || std::memcmp(magic, kMagic, 8) != 0) {
    std::fclose(f);
    throw std::runtime_error("network file: bad magic: " + path);
  }
  const int obs_ego = static_cast<int>(read_u32(f));
  const int obs_social = static_cast<int>(read_u32(f));
  const int action_dim = static_cast<int>(read_u32(f));
  const int out_dim = static_cast<int>(read_u32(f));
  const int hidden = static_cast<int>(read_u32(f));
  const uint32_t n_layers = read_u32(f);
  Rng rng(0);
  PolicyNet net(obs_ego, obs_social, action_dim, out_dim, hidden, rng);
  auto layers = net.layers();
  if (n_layers != layers.size()) {
    std::fclose(f);
    throw std::runtime_error("network file: unexpected layer count");
  }
  for (Linear* l : layers) {
    const int in = static_cast<int>(read_u32(f));
    const int out = static_cast<int>(read_u32(f));
    if (in != l->in || out != l->out) {
      std::fclose(f);
      throw std::runtime_error("network file: layer shape mismatch");
    }
  }
  for (Linear* l : layers) {
    const bool ok = std::fread(l->w.data(), sizeof(double), l->w.size(), f) == l->w.size() &&
                    std::fread(l->b.data(), sizeof(double), l->b.size(), f) == l->b.size();
    if (!ok) {
      std::fclose(f);
      throw std::runtime_error("network file: truncated parameters");
    }
  }
  std::fclose(f);
  return net;
}

}  // namespace ixsim
