// nnet/train.cpp

// Copyright 2026  Cantus Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cantus/train.h"

#include <algorithm>
#include <cmath>

#include "cantus/kernels.h"

namespace cantus {

Criterion criterion_from_string(const std::string& s) {
  if (s == "static") return Criterion::Static;
  if (s == "dynamic_target") return Criterion::DynamicTarget;
  if (s == "static_out_dynamic") return Criterion::StaticOutDynamic;
  throw ConfigError("unknown criterion: " + s);
}

std::string criterion_to_string(Criterion c) {
  switch (c) {
    case Criterion::Static: return "static";
    case Criterion::DynamicTarget: return "dynamic_target";
    case Criterion::StaticOutDynamic: return "static_out_dynamic";
  }
  return "static";
}

std::vector<ParamView> network_param_views(Network& net) {
  std::vector<ParamView> views;
  for (auto& layer : net.layers) {
    views.push_back({layer.w.data.data(), layer.w.data.size()});
    views.push_back({layer.b.data(), layer.b.size()});
  }
  return views;
}

AdamOptimizer::AdamOptimizer(const AdamConfig& cfg, std::size_t total_params)
    : cfg_(cfg), m_(total_params, 0.0), v_(total_params, 0.0) {}

void AdamOptimizer::step(const std::vector<ParamView>& params,
                         const std::vector<ParamView>& grads) {
  // global-norm clip
  double norm_sq = 0.0;
  for (const auto& g : grads) norm_sq += kernels::sumsq(g.p, g.n);
  double norm = std::sqrt(norm_sq);
  double clip_scale = 1.0;
  if (cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm) clip_scale = cfg_.clip_norm / norm;

  ++t_;
  double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
  double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
  std::size_t off = 0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    double* p = params[k].p;
    const double* g = grads[k].p;
    for (std::size_t i = 0; i < params[k].n; ++i) {
      double gi = g[i] * clip_scale;
      m_[off + i] = cfg_.beta1 * m_[off + i] + (1.0 - cfg_.beta1) * gi;
      v_[off + i] = cfg_.beta2 * v_[off + i] + (1.0 - cfg_.beta2) * gi * gi;
      double mhat = m_[off + i] / bc1;
      double vhat = v_[off + i] / bc2;
      p[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    off += params[k].n;
  }
}

namespace {

double pitch_at(const std::vector<double>& pitch, std::size_t i) {
  return pitch.empty() ? 0.0 : pitch[i];
}

void check_finite(double loss, int epoch, const char* what) {
  if (!std::isfinite(loss)) {
    throw NumericError(std::string(what) + ": loss became non-finite at epoch " +
                       std::to_string(epoch) + "; lower the learning rate or check the data");
  }
}

}  // namespace

TrainResult train_regression_mse(Network& net, const Matrix& x, const Matrix& y,
                                 const std::vector<double>& note_pitch,
                                 const AdamConfig& cfg) {
  if (x.rows != y.rows) throw DataError("train_regression_mse: row mismatch");
  TrainResult result;
  Network grad = net.zeros_like();
  AdamOptimizer opt(cfg, net.param_count());
  auto pviews = network_param_views(net);
  auto gviews = network_param_views(grad);
  const double inv_n = x.rows ? 1.0 / static_cast<double>(x.rows) : 0.0;

  Network::Trace trace;
  std::vector<double> out, dout;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (auto& gl : grad.layers) {
      std::fill(gl.w.data.begin(), gl.w.data.end(), 0.0);
      std::fill(gl.b.begin(), gl.b.end(), 0.0);
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      net.forward_trace(std::span(x.row(i), x.cols), pitch_at(note_pitch, i), trace, out);
      dout.assign(out.size(), 0.0);
      for (std::size_t d = 0; d < out.size(); ++d) {
        double delta = out[d] - y.at(i, d);
        loss += 0.5 * delta * delta * inv_n;
        dout[d] = delta * inv_n;
      }
      net.backward(trace, dout, grad);
    }
    check_finite(loss, epoch, "train_regression_mse");
    result.loss_curve.push_back(loss);
    opt.step(pviews, gviews);
  }
  return result;
}

TrainResult train_mdn(Network& net, const Matrix& x, const std::vector<double>& y,
                      const std::vector<double>& note_pitch,
                      const AdamConfig& cfg) {
  if (x.rows != y.size()) throw DataError("train_mdn: row mismatch");
  if (net.cfg.output_dim != 2) throw ConfigError("train_mdn: MDN head needs output_dim == 2");
  TrainResult result;
  Network grad = net.zeros_like();
  AdamOptimizer opt(cfg, net.param_count());
  auto pviews = network_param_views(net);
  auto gviews = network_param_views(grad);
  const double inv_n = x.rows ? 1.0 / static_cast<double>(x.rows) : 0.0;

  Network::Trace trace;
  std::vector<double> out, dout(2);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (auto& gl : grad.layers) {
      std::fill(gl.w.data.begin(), gl.w.data.end(), 0.0);
      std::fill(gl.b.begin(), gl.b.end(), 0.0);
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
      net.forward_trace(std::span(x.row(i), x.cols), pitch_at(note_pitch, i), trace, out);
      double dmean, dlogvar;
      loss += inv_n * mdn_nll(out[0], out[1], y[i], &dmean, &dlogvar);
      dout[0] = dmean * inv_n;
      dout[1] = dlogvar * inv_n;
      net.backward(trace, dout, grad);
    }
    check_finite(loss, epoch, "train_mdn");
    result.loss_curve.push_back(loss);
    opt.step(pviews, gviews);
  }
  return result;
}

int StreamLayout::total_dim() const {
  int d = 0;
  for (const auto& s : streams) d += s.dim;
  return d;
}

int StreamLayout::f0_offset() const {
  int off = 0;
  for (const auto& s : streams) {
    if (s.is_f0) return off;
    off += s.dim;
  }
  return -1;
}

int StreamLayout::stream_offset(int index) const {
  int off = 0;
  for (int i = 0; i < index; ++i) off += streams[i].dim;
  return off;
}

namespace {

// Copies stream column block [off, off+dim) of a T x D matrix.
Matrix slice_cols(const Matrix& m, int off, int dim) {
  Matrix out(m.rows, dim);
  for (std::size_t t = 0; t < m.rows; ++t) {
    for (int k = 0; k < dim; ++k) out.at(t, k) = m.at(t, off + k);
  }
  return out;
}

Matrix residualized_targets(const TrainRecord& rec, int f0_off) {
  Matrix res = rec.targets;
  if (f0_off >= 0) {
    for (std::size_t t = 0; t < res.rows; ++t) res.at(t, f0_off) -= rec.note_pitch[t];
  }
  return res;
}

}  // namespace

void estimate_acoustic_gv(const std::vector<TrainRecord>& records,
                          const StreamLayout& layout, const WindowSet& windows,
                          GlobalVariance* gv_static, GlobalVariance* gv_dynamic) {
  const int f0_off = layout.f0_offset();
  std::vector<Matrix> statics, dynamics;
  statics.reserve(records.size());
  dynamics.reserve(records.size());
  for (const auto& rec : records) {
    statics.push_back(residualized_targets(rec, f0_off));
    WindowOp op(static_cast<int>(rec.targets.rows), windows);
    dynamics.push_back(apply_windows(statics.back(), op));
  }
  std::vector<const Matrix*> sp, dp;
  for (const auto& m : statics) sp.push_back(&m);
  for (const auto& m : dynamics) dp.push_back(&m);
  if (gv_static) *gv_static = estimate_global_variance(sp);
  if (gv_dynamic) *gv_dynamic = estimate_global_variance(dp);
}

AcousticModel train_acoustic(const std::vector<TrainRecord>& records,
                             const StreamLayout& layout,
                             const AcousticConfig& cfg, TrainResult* result) {
  if (records.empty()) throw DataError("train_acoustic: empty dataset");
  const int D = layout.total_dim();
  const int W = cfg.windows.count();
  const int f0_off = layout.f0_offset();
  if (cfg.prior.enabled() && f0_off < 0)
    throw ConfigError("train_acoustic: prior requires an f0 stream");
  if (cfg.crit == Criterion::DynamicTarget &&
      (cfg.prior.enabled() || cfg.train_bias))
    throw ConfigError(
        "train_acoustic: pitch prior / bias require a static-output criterion");
  for (const auto& rec : records) {
    if (static_cast<int>(rec.targets.cols) != D)
      throw DataError("train_acoustic: target dimension mismatch");
    if (rec.note_pitch.size() != rec.targets.rows ||
        rec.features.rows != rec.targets.rows)
      throw DataError("train_acoustic: frame count mismatch");
  }

  AcousticModel model;
  model.layout = layout;
  model.windows = cfg.windows;
  model.crit = cfg.crit;
  model.prior = cfg.prior;
  estimate_acoustic_gv(records, layout, cfg.windows, &model.gv_static,
                       &model.gv_dynamic);

  NetworkConfig ncfg = cfg.net;
  ncfg.input_dim = static_cast<int>(records[0].features.cols);
  ncfg.output_dim = (cfg.crit == Criterion::DynamicTarget) ? W * D : D;
  model.net = Network::create(ncfg);
  model.net.init_random(cfg.adam.seed, cfg.adam.init_scale);

  // Per-record precomputation.
  struct RecordCtx {
    WindowOp op;            // criterion operator (full or identity)
    WindowOp op_full;       // window set of the model (DynamicTarget targets)
    std::vector<double> weight;
    BiasExpansion bias_exp;
    Matrix dyn_targets;     // DynamicTarget only
    std::vector<double> f0_col;
    int bias_offset = 0;
  };
  const WindowSet identity = WindowSet::static_only();
  std::vector<RecordCtx> ctx;
  ctx.reserve(records.size());
  int total_biases = 0;
  for (const auto& rec : records) {
    const int T = static_cast<int>(rec.targets.rows);
    RecordCtx c{
        WindowOp(T, cfg.crit == Criterion::Static ? identity : cfg.windows),
        WindowOp(T, cfg.windows),
        build_weight_vector(rec.spans, T, cfg.prior.w_max, cfg.prior.ramp),
        BiasExpansion::build(rec.spans),
        Matrix(),
        {},
        total_biases};
    if (cfg.crit == Criterion::DynamicTarget) {
      c.dyn_targets = apply_windows(residualized_targets(rec, f0_off), c.op_full);
    }
    if (f0_off >= 0) {
      c.f0_col.resize(T);
      for (int t = 0; t < T; ++t) c.f0_col[t] = rec.targets.at(t, f0_off);
    }
    total_biases += c.bias_exp.num_biases();
    ctx.push_back(std::move(c));
  }
  if (cfg.train_bias) model.bias.assign(total_biases, 0.0);

  // f0-stream variance per criterion window.
  std::vector<double> gv_f0;
  if (f0_off >= 0) {
    if (cfg.crit == Criterion::Static) {
      gv_f0 = {model.gv_static.var[f0_off]};
    } else {
      for (int w = 0; w < W; ++w) gv_f0.push_back(model.gv_dynamic.var[static_cast<std::size_t>(w) * D + f0_off]);
    }
  }

  Network grad = model.net.zeros_like();
  std::vector<double> bias_grad(model.bias.size(), 0.0);
  auto pviews = network_param_views(model.net);
  auto gviews = network_param_views(grad);
  if (cfg.train_bias && !model.bias.empty()) {
    pviews.push_back({model.bias.data(), model.bias.size()});
    gviews.push_back({bias_grad.data(), bias_grad.size()});
  }
  AdamOptimizer opt(cfg.adam, model.net.param_count() + model.bias.size());

  TrainResult local;
  TrainResult& res = result ? *result : local;
  Network::Trace trace;
  std::vector<double> out;

  for (int epoch = 0; epoch < cfg.adam.epochs; ++epoch) {
    for (auto& gl : grad.layers) {
      std::fill(gl.w.data.begin(), gl.w.data.end(), 0.0);
      std::fill(gl.b.begin(), gl.b.end(), 0.0);
    }
    std::fill(bias_grad.begin(), bias_grad.end(), 0.0);
    double loss = 0.0;

    for (std::size_t r = 0; r < records.size(); ++r) {
      const TrainRecord& rec = records[r];
      RecordCtx& c = ctx[r];
      const int T = static_cast<int>(rec.targets.rows);

      Matrix pred(T, model.net.cfg.output_dim);
      for (int t = 0; t < T; ++t) {
        model.net.forward(std::span(rec.features.row(t), rec.features.cols),
                          rec.note_pitch[t], out);
        std::copy(out.begin(), out.end(), pred.row(t));
      }

      Matrix grad_pred(T, model.net.cfg.output_dim);
      if (cfg.crit == Criterion::DynamicTarget) {
        Matrix g;
        loss += loss_dynamic_target(pred, c.dyn_targets, model.gv_dynamic, &g);
        grad_pred = std::move(g);
      } else {
        for (std::size_t s = 0; s < layout.streams.size(); ++s) {
          const auto& stream = layout.streams[s];
          const int off = layout.stream_offset(static_cast<int>(s));
          if (stream.is_f0) {
            std::vector<double> mu(T);
            for (int t = 0; t < T; ++t) mu[t] = pred.at(t, off);
            std::vector<double> b_exp;
            const std::vector<double>* b_ptr = nullptr;
            if (cfg.train_bias) {
              std::vector<double> seg(model.bias.begin() + c.bias_offset,
                                      model.bias.begin() + c.bias_offset + c.bias_exp.num_biases());
              b_exp = c.bias_exp.expand(seg);
              b_ptr = &b_exp;
            }
            std::vector<double> gmu, gb;
            loss += f0_prior_loss(mu, c.f0_col, rec.note_pitch, b_ptr, c.op,
                                  GlobalVariance{gv_f0}, c.weight,
                                  cfg.prior.sigma_p, &gmu,
                                  cfg.train_bias ? &gb : nullptr);
            for (int t = 0; t < T; ++t) grad_pred.at(t, off) = gmu[t];
            if (cfg.train_bias) {
              c.bias_exp.accumulate_adjoint(gb.data(), bias_grad.data() + c.bias_offset);
            }
          } else {
            Matrix pred_s = slice_cols(pred, off, stream.dim);
            Matrix targ_s = slice_cols(rec.targets, off, stream.dim);
            Matrix g;
            if (cfg.crit == Criterion::Static) {
              GlobalVariance gvs;
              for (int k = 0; k < stream.dim; ++k) gvs.var.push_back(model.gv_static.var[off + k]);
              loss += loss_static(pred_s, targ_s, gvs, &g);
            } else {
              GlobalVariance gvd;
              for (int w = 0; w < W; ++w) {
                for (int k = 0; k < stream.dim; ++k) {
                  gvd.var.push_back(model.gv_dynamic.var[static_cast<std::size_t>(w) * D + off + k]);
                }
              }
              loss += loss_static_out_dynamic(pred_s, targ_s, c.op, gvd, &g);
            }
            for (int t = 0; t < T; ++t) {
              for (int k = 0; k < stream.dim; ++k) grad_pred.at(t, off + k) = g.at(t, k);
            }
          }
        }
      }

      // Backprop (second forward pass per frame to keep memory flat).
      for (int t = 0; t < T; ++t) {
        model.net.forward_trace(std::span(rec.features.row(t), rec.features.cols),
                                rec.note_pitch[t], trace, out);
        model.net.backward(trace, std::span(grad_pred.row(t), grad_pred.cols), grad);
      }
    }

    check_finite(loss, epoch, "train_acoustic");
    res.loss_curve.push_back(loss);
    opt.step(pviews, gviews);
  }
  return model;
}

Matrix acoustic_infer_static(const AcousticModel& model, const Matrix& features,
                             const std::vector<double>& note_pitch) {
  if (features.rows != note_pitch.size())
    throw DataError("acoustic_infer_static: frame count mismatch");
  const int T = static_cast<int>(features.rows);
  Matrix pred(T, model.net.cfg.output_dim);
  std::vector<double> out;
  for (int t = 0; t < T; ++t) {
    model.net.forward(std::span(features.row(t), features.cols), note_pitch[t], out);
    std::copy(out.begin(), out.end(), pred.row(t));
  }
  if (model.crit == Criterion::DynamicTarget) {
    WindowOp op(T, model.windows);
    return mlpg(pred, model.gv_dynamic.var, op);
  }
  return pred;
}

}  // namespace cantus
