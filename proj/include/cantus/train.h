// cantus/train.h

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

#ifndef CANTUS_TRAIN_H_
#define CANTUS_TRAIN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cantus/common.h"
#include "cantus/losses.h"
#include "cantus/network.h"
#include "cantus/prior.h"
#include "cantus/window.h"

namespace cantus {

// Training criteria for the acoustic model. Static fits statics only;
// DynamicTarget fits window-extended outputs (generation then runs the
// parameter generation algorithm); StaticOutDynamic fits W * (static
// prediction) against W * target so dynamics constrain training only.
enum class Criterion { Static, DynamicTarget, StaticOutDynamic };

Criterion criterion_from_string(const std::string& s);
std::string criterion_to_string(Criterion c);

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;  // global gradient norm clip
  int epochs = 200;
  std::uint64_t seed = 1234;
  double init_scale = 0.5;
};

struct TrainResult {
  std::vector<double> loss_curve;  // total objective per epoch
};

// Mutable parameter block; the optimizer walks these in a fixed order so
// updates are reproducible.
struct ParamView {
  double* p = nullptr;
  std::size_t n = 0;
};

std::vector<ParamView> network_param_views(Network& net);

class AdamOptimizer {
 public:
  AdamOptimizer(const AdamConfig& cfg, std::size_t total_params);
  // Applies global-norm clipping to grads, then one Adam update.
  void step(const std::vector<ParamView>& params,
            const std::vector<ParamView>& grads);

 private:
  AdamConfig cfg_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

// Row-wise trainers for the timing models. `note_pitch` feeds the skip
// connection and may be empty (treated as zero).
TrainResult train_regression_mse(Network& net, const Matrix& x, const Matrix& y,
                                 const std::vector<double>& note_pitch,
                                 const AdamConfig& cfg);
// Single-Gaussian MDN trainer: net outputs [mean, logvar] per row; maximizes
// the duration likelihood.
TrainResult train_mdn(Network& net, const Matrix& x,
                      const std::vector<double>& y,
                      const std::vector<double>& note_pitch,
                      const AdamConfig& cfg);

// One song of acoustic training data. The f0 stream column of `targets`
// holds the absolute vibrato-removed log F0 in cents (the criterion
// residualizes against `note_pitch` internally); other stream columns are
// fitted directly.
struct TrainRecord {
  Matrix features;                 // T x F
  std::vector<double> note_pitch;  // T, cents (training-time pitch source)
  Matrix targets;                  // T x D statics
  std::vector<NoteSpan> spans;
  std::vector<std::uint8_t> voiced;  // metrics only; may be empty
};

struct StreamLayout {
  struct Stream {
    std::string name;
    int dim = 1;
    bool is_f0 = false;
  };
  std::vector<Stream> streams;

  int total_dim() const;
  int f0_offset() const;  // -1 when no f0 stream
  int stream_offset(int index) const;
};

struct AcousticConfig {
  NetworkConfig net;  // output_dim derived from layout and criterion
  Criterion crit = Criterion::StaticOutDynamic;
  WindowSet windows = WindowSet::standard();
  PriorConfig prior;        // sigma_p = inf disables
  bool train_bias = false;  // note-level pitch bias parameters
  AdamConfig adam;
};

// Everything needed to run generation later.
struct AcousticModel {
  Network net;
  StreamLayout layout;
  WindowSet windows;
  Criterion crit = Criterion::StaticOutDynamic;
  GlobalVariance gv_static;
  GlobalVariance gv_dynamic;  // over window-extended dims
  PriorConfig prior;
  std::vector<double> bias;  // one per non-rest note of the corpus; may be empty
};

// Residual-target global variances for a dataset (f0 column residualized
// against each record's note pitch).
void estimate_acoustic_gv(const std::vector<TrainRecord>& records,
                          const StreamLayout& layout, const WindowSet& windows,
                          GlobalVariance* gv_static, GlobalVariance* gv_dynamic);

AcousticModel train_acoustic(const std::vector<TrainRecord>& records,
                             const StreamLayout& layout,
                             const AcousticConfig& cfg, TrainResult* result);

// Static feature means for one song: forward pass, plus parameter
// generation when the model was trained on dynamic targets. Returns T x D.
Matrix acoustic_infer_static(const AcousticModel& model, const Matrix& features,
                             const std::vector<double>& note_pitch);

}  // namespace cantus

#endif  // CANTUS_TRAIN_H_
