// pipeline/pipeline.cpp

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

#include "cantus/pipeline.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "cantus/checkpoint.h"
#include "cantus/musicxml.h"

namespace cantus {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path fp(p);
  return fp.is_absolute() ? fp.string() : (base / fp).string();
}

AdamConfig adam_from_json(const json& j, const AdamConfig& defaults) {
  AdamConfig a = defaults;
  a.lr = j.value("lr", a.lr);
  a.epochs = j.value("epochs", a.epochs);
  a.seed = j.value("seed", a.seed);
  a.clip_norm = j.value("clip_norm", a.clip_norm);
  a.init_scale = j.value("init_scale", a.init_scale);
  return a;
}

TimingModelConfig timing_from_json(const json& j, const TimingModelConfig& defaults) {
  TimingModelConfig c = defaults;
  if (j.contains("hidden_widths")) c.hidden_widths = j.at("hidden_widths").get<std::vector<int>>();
  if (j.contains("activation")) c.activation = activation_from_string(j.at("activation"));
  c.adam = adam_from_json(j, c.adam);
  return c;
}

}  // namespace

ProjectConfig ProjectConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open project config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("project config " + path + ": invalid JSON: " + e.what());
  }
  fs::path base = fs::path(path).parent_path();

  ProjectConfig cfg;
  cfg.frame_shift_s = j.value("frame_shift_s", cfg.frame_shift_s);
  if (!(cfg.frame_shift_s > 0.0)) throw ConfigError("frame_shift_s must be positive");
  cfg.schema_path = resolve(base, j.value("schema", ""));
  if (cfg.schema_path.empty()) throw ConfigError("project config: `schema` is required");
  cfg.inventory_path = resolve(base, j.value("inventory", ""));
  cfg.language = j.value("language", cfg.language);
  cfg.labels_htk_units = j.value("labels_htk_units", cfg.labels_htk_units);
  cfg.default_tempo_bpm = j.value("default_tempo_bpm", cfg.default_tempo_bpm);

  for (const auto& js : j.value("songs", json::array())) {
    SongPaths sp;
    sp.name = js.value("name", "");
    sp.score = resolve(base, js.value("score", ""));
    sp.labels = resolve(base, js.value("labels", ""));
    sp.f0 = resolve(base, js.value("f0", ""));
    if (sp.name.empty() || sp.score.empty())
      throw ConfigError("project config: every song needs `name` and `score`");
    cfg.songs.push_back(std::move(sp));
  }

  if (j.contains("timelag_model")) cfg.timelag = timing_from_json(j["timelag_model"], cfg.timelag);
  if (j.contains("duration_model")) cfg.duration = timing_from_json(j["duration_model"], cfg.duration);

  if (j.contains("acoustic_model")) {
    const json& ja = j["acoustic_model"];
    if (ja.contains("hidden_widths"))
      cfg.acoustic.net.hidden_widths = ja.at("hidden_widths").get<std::vector<int>>();
    if (ja.contains("activation"))
      cfg.acoustic.net.hidden_act = activation_from_string(ja.at("activation"));
    cfg.acoustic.net.skip_layer = ja.value("skip_layer", cfg.acoustic.net.skip_layer);
    if (ja.contains("criterion"))
      cfg.acoustic.crit = criterion_from_string(ja.at("criterion"));
    cfg.acoustic.adam = adam_from_json(ja, cfg.acoustic.adam);
  }

  if (j.contains("correction")) {
    const json& jc = j["correction"];
    if (jc.contains("note_pitch_mode"))
      cfg.correction.mode = note_pitch_mode_from_string(jc.at("note_pitch_mode"));
    if (jc.contains("sigma_p") && !jc.at("sigma_p").is_null()) {
      cfg.correction.prior.sigma_p = jc.at("sigma_p").get<double>();
      if (!(cfg.correction.prior.sigma_p > 0.0))
        throw ConfigError("correction.sigma_p must be positive");
    }
    cfg.correction.prior.w_max = jc.value("w_max", cfg.correction.prior.w_max);
    cfg.correction.prior.ramp = jc.value("ramp", cfg.correction.prior.ramp);
  }

  if (j.contains("features")) {
    const json& jf = j["features"];
    cfg.features.median_window = jf.value("median_window", cfg.features.median_window);
    cfg.features.include_sine_vibrato =
        jf.value("include_sine_vibrato", cfg.features.include_sine_vibrato);
  }
  if (j.contains("vibrato_thresholds")) {
    const json& jv = j["vibrato_thresholds"];
    auto& th = cfg.features.vibrato;
    th.a_min = jv.value("a_min", th.a_min);
    th.a_max = jv.value("a_max", th.a_max);
    th.f_min = jv.value("f_min", th.f_min);
    th.f_max = jv.value("f_max", th.f_max);
    th.min_half_cycles = jv.value("min_half_cycles", th.min_half_cycles);
    th.median_window = jv.value("median_window", th.median_window);
  }
  if (j.contains("heuristic")) {
    const json& jh = j["heuristic"];
    auto& h = cfg.features.heuristic;
    h.median_window = jh.value("median_window", h.median_window);
    h.slope_threshold_cents = jh.value("slope_threshold_cents", h.slope_threshold_cents);
    h.min_flat_run = jh.value("min_flat_run", h.min_flat_run);
  }
  if (j.contains("timing_repair")) {
    std::string m = j.at("timing_repair");
    if (m == "error") cfg.timing_repair = RepairMode::HardError;
    else if (m == "repair") cfg.timing_repair = RepairMode::Repair;
    else throw ConfigError("timing_repair must be `error` or `repair`");
  }
  cfg.vibrato_scale = j.value("vibrato_scale", cfg.vibrato_scale);

  cfg.checkpoint_dir = resolve(base, j.value("checkpoint_dir", cfg.checkpoint_dir));
  cfg.output_dir = resolve(base, j.value("output_dir", cfg.output_dir));
  cfg.report_dir = resolve(base, j.value("report_dir", cfg.report_dir));
  return cfg;
}

ProjectData load_project_data(const ProjectConfig& cfg, bool need_f0, bool need_labels) {
  ProjectData data;
  data.inventory = cfg.inventory_path.empty() ? PhonemeInventory::default_japanese()
                                              : PhonemeInventory::load(cfg.inventory_path);
  data.schema = ScoreFeatureSchema::load(cfg.schema_path, data.inventory);
  LongVowelRules rules = LongVowelRules::by_id(cfg.language);

  MusicXmlOptions mxl;
  mxl.default_tempo_bpm = cfg.default_tempo_bpm;
  mxl.frame_shift_s = cfg.frame_shift_s;

  for (const auto& sp : cfg.songs) {
    SongData song;
    song.score = resolve_long_vowels(load_musicxml(sp.score, data.inventory, mxl), rules);
    song.score.validate();
    if (need_labels) {
      if (sp.labels.empty()) throw ConfigError("song " + sp.name + ": `labels` is required");
      song.alignment = PhonemeAlignment::load(sp.labels, cfg.labels_htk_units, cfg.frame_shift_s);
    }
    if (need_f0) {
      if (sp.f0.empty()) throw ConfigError("song " + sp.name + ": `f0` is required");
      song.f0 = F0Track::load(sp.f0);
    }
    data.songs.push_back(std::move(song));
    data.names.push_back(sp.name);
  }
  return data;
}

void cmd_train_timelag(const ProjectConfig& cfg, const std::string& out_path) {
  ProjectData data = load_project_data(cfg, /*need_f0=*/false, /*need_labels=*/true);
  std::vector<double> targets;
  std::vector<std::vector<double>> rows;
  std::size_t arity = data.schema.arity();
  for (const auto& song : data.songs) {
    Matrix feats = encode_note_features(song.score, data.schema);
    auto refs = reference_phonemes(song.score);
    TimeLagVector lags = compute_time_lag_targets(song.score, song.alignment, refs);
    for (std::size_t n = 0; n < feats.rows; ++n) {
      rows.emplace_back(feats.row(n), feats.row(n) + arity);
      targets.push_back(lags.lag_frames[n]);
    }
  }
  Matrix x(rows.size(), arity);
  Matrix y(rows.size(), 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy(rows[i].begin(), rows[i].end(), x.row(i));
    y.at(i, 0) = targets[i];
  }
  NetworkConfig ncfg;
  ncfg.input_dim = static_cast<int>(arity);
  ncfg.hidden_widths = cfg.timelag.hidden_widths;
  ncfg.hidden_act = cfg.timelag.activation;
  ncfg.output_dim = 1;
  Network net = Network::create(ncfg);
  net.init_random(cfg.timelag.adam.seed, cfg.timelag.adam.init_scale);
  train_regression_mse(net, x, y, {}, cfg.timelag.adam);
  save_network_checkpoint(out_path, "timelag", net, data.schema.hash());
}

void cmd_train_duration(const ProjectConfig& cfg, const std::string& out_path) {
  ProjectData data = load_project_data(cfg, /*need_f0=*/false, /*need_labels=*/true);
  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  std::size_t arity = data.schema.arity();
  for (const auto& song : data.songs) {
    Matrix feats = encode_phoneme_features(song.score, data.schema);
    if (feats.rows != song.alignment.segments.size())
      throw DataError("duration training: phoneme/segment count mismatch");
    map_alignment_to_score(song.score, song.alignment);  // symbol check
    for (std::size_t k = 0; k < feats.rows; ++k) {
      rows.emplace_back(feats.row(k), feats.row(k) + arity);
      targets.push_back(song.alignment.segments[k].end_frame -
                        song.alignment.segments[k].start_frame);
    }
  }
  Matrix x(rows.size(), arity);
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy(rows[i].begin(), rows[i].end(), x.row(i));
  NetworkConfig ncfg;
  ncfg.input_dim = static_cast<int>(arity);
  ncfg.hidden_widths = cfg.duration.hidden_widths;
  ncfg.hidden_act = cfg.duration.activation;
  ncfg.output_dim = 2;
  Network net = Network::create(ncfg);
  net.init_random(cfg.duration.adam.seed, cfg.duration.adam.init_scale);
  train_mdn(net, x, targets, {}, cfg.duration.adam);
  save_network_checkpoint(out_path, "duration", net, data.schema.hash());
}

void cmd_train_acoustic(const ProjectConfig& cfg, const std::string& out_path) {
  ProjectData data = load_project_data(cfg, /*need_f0=*/true, /*need_labels=*/true);
  CorrectionSystem sys = run_configuration(cfg.correction, data.songs, data.schema,
                                           cfg.acoustic, cfg.features, nullptr);
  save_acoustic_checkpoint(out_path, sys.model, data.schema.hash());
}

GenerationResult generate_song(const Score& score, const Network& timelag_net,
                               const Network& duration_net,
                               const AcousticModel& acoustic,
                               const ScoreFeatureSchema& schema,
                               RepairMode timing_repair, double vibrato_scale) {
  GenerationResult out;

  // 1. time lags (rounded to whole frames so totals telescope exactly)
  Matrix note_feats = encode_note_features(score, schema);
  TimeLagVector lags = round_lags(predict_time_lags(note_feats, timelag_net));

  // 2. adjusted note lengths
  std::vector<int> lengths;
  for (const auto& n : score.notes) lengths.push_back(n.length_frames);
  AdjustedNoteLengths adjusted = adjust_note_lengths(lengths, lags, timing_repair);
  out.timing_repaired = adjusted.repaired;

  // 3. per-note constrained ML duration allocation
  Matrix ph_feats = encode_phoneme_features(score, schema);
  DurationDistribution all = predict_durations(ph_feats, duration_net);
  std::size_t k = 0;
  int t = 0;
  for (std::size_t n = 0; n < score.notes.size(); ++n) {
    std::size_t count = score.notes[n].is_rest() ? 1 : score.notes[n].phonemes.size();
    DurationDistribution dist;
    dist.mean.assign(all.mean.begin() + k, all.mean.begin() + k + count);
    dist.var.assign(all.var.begin() + k, all.var.begin() + k + count);
    AllocationResult alloc = allocate_ml(adjusted.frames[n], dist, timing_repair);
    out.timing_repaired |= alloc.repaired;
    for (std::size_t i = 0; i < count; ++i) {
      std::string sym = score.notes[n].is_rest() ? "sil" : score.notes[n].phonemes[i].symbol;
      out.alignment.segments.push_back({t, t + alloc.frames[i], sym});
      t += alloc.frames[i];
    }
    k += count;
  }
  out.alignment.validate();

  // 4->6. frame features, acoustic regression, denormalization
  out.f0 = synthesize_f0(acoustic, score, out.alignment, schema, vibrato_scale);

  out.voiced.assign(t, 1);
  for (const auto& seg : out.alignment.segments) {
    if (seg.phoneme == "sil") {
      for (int i = seg.start_frame; i < seg.end_frame; ++i) out.voiced[i] = 0;
    }
  }
  return out;
}

MetricsReport evaluate_f0(const std::vector<double>& generated_cents,
                          const std::vector<std::uint8_t>& generated_voiced,
                          const Score& score, const PhonemeAlignment& alignment,
                          const F0Track* natural) {
  auto spans = note_spans_from_alignment(score, alignment);
  BiasExpansion exp = BiasExpansion::build(spans);
  std::vector<double> pitches;
  for (std::size_t n = 0; n < spans.size(); ++n) {
    if (!spans[n].is_rest) pitches.push_back(score.notes[n].pitch_cents());
  }
  std::vector<double> p = exp.expand(pitches);
  if (p.size() != generated_cents.size())
    throw DataError("evaluate_f0: frame count mismatch");

  MetricsReport report;
  report.rmse_note = rmse(generated_cents, p, &generated_voiced);
  report.corr_note = pearson_corr(generated_cents, p, &generated_voiced);
  if (natural) {
    if (natural->cents.size() != generated_cents.size())
      throw DataError("evaluate_f0: natural track length mismatch");
    std::vector<std::uint8_t> both(generated_voiced);
    for (std::size_t i = 0; i < both.size(); ++i) both[i] = both[i] && natural->voiced[i];
    report.rmse_nat = rmse(generated_cents, natural->cents, &both);
    report.corr_nat = pearson_corr(generated_cents, natural->cents, &both);
  }
  return report;
}

void write_synthetic_project(const std::string& dir, const SynthdataOptions& options) {
  fs::create_directories(dir);
  fs::create_directories(fs::path(dir) / "scores");
  fs::create_directories(fs::path(dir) / "labels");
  fs::create_directories(fs::path(dir) / "f0");
  fs::create_directories(fs::path(dir) / "ledger");

  std::vector<SyntheticSong> songs = generate_corpus(options.corpus);
  json jsongs = json::array();
  for (std::size_t s = 0; s < songs.size(); ++s) {
    char name[32];
    std::snprintf(name, sizeof name, "s%03zu", s);
    const SyntheticSong& song = songs[s];
    write_file_atomic((fs::path(dir) / "scores" / (std::string(name) + ".musicxml")).string(),
                      write_musicxml(song.score));
    write_file_atomic((fs::path(dir) / "labels" / (std::string(name) + ".lab")).string(),
                      song.alignment.to_label_text());
    {
      std::ostringstream f0txt;
      char buf[64];
      for (double h : song.f0.to_hz()) {
        std::snprintf(buf, sizeof buf, "%.6f\n", h);
        f0txt << buf;
      }
      write_file_atomic((fs::path(dir) / "f0" / (std::string(name) + ".f0")).string(), f0txt.str());
    }
    json jl;
    jl["note_stair"] = song.ledger.note_stair;
    jl["detune"] = song.ledger.detune;
    jl["transient"] = song.ledger.transient;
    jl["vibrato"] = song.ledger.vibrato;
    jl["noise"] = song.ledger.noise;
    jl["detune_per_note"] = song.ledger.detune_per_note;
    jl["lag_per_note"] = song.ledger.lag_per_note;
    write_file_atomic((fs::path(dir) / "ledger" / (std::string(name) + ".json")).string(),
                      jl.dump(1));
    jsongs.push_back({{"name", name},
                      {"score", std::string("scores/") + name + ".musicxml"},
                      {"labels", std::string("labels/") + name + ".lab"},
                      {"f0", std::string("f0/") + name + ".f0"}});
  }

  // feature schema
  std::ostringstream schema;
  schema << "version 1\n";
  schema << "categorical phoneme @inventory\n";
  schema << "categorical phoneme_class vowel consonant breath silence\n";
  schema << "numeric note_pitch\n";
  schema << "numeric note_length\n";
  schema << "numeric note_pos\n";
  schema << "numeric index_in_note\n";
  schema << "numeric frac_in_note\n";
  schema << "numeric frac_in_phoneme\n";
  if (options.note_index_labels > 0) {
    schema << "categorical note_index";
    for (int i = 0; i < options.note_index_labels; ++i) schema << ' ' << i;
    schema << "\n";
  }
  if (!options.schema_extra.empty()) schema << options.schema_extra;
  write_file_atomic((fs::path(dir) / "schema.txt").string(), schema.str());

  json jp;
  jp["frame_shift_s"] = 0.005;
  jp["schema"] = "schema.txt";
  jp["songs"] = std::move(jsongs);
  write_file_atomic((fs::path(dir) / "project.json").string(), jp.dump(1));
}

std::string render_preview_tone_wav(const std::vector<double>& f0_hz,
                                    double frame_shift_s, int sample_rate) {
  const int samples_per_frame =
      std::max(1, static_cast<int>(std::llround(frame_shift_s * sample_rate)));
  const std::size_t n_samples = f0_hz.size() * samples_per_frame;
  std::vector<std::int16_t> pcm(n_samples, 0);
  double phase = 0.0;
  for (std::size_t f = 0; f < f0_hz.size(); ++f) {
    double hz = f0_hz[f];
    for (int i = 0; i < samples_per_frame; ++i) {
      std::size_t idx = f * samples_per_frame + i;
      if (hz > 0.0) {
        phase += 2.0 * std::numbers::pi * hz / sample_rate;
        double v = 0.6 * std::sin(phase) + 0.25 * std::sin(2 * phase) + 0.1 * std::sin(3 * phase);
        pcm[idx] = static_cast<std::int16_t>(0.3 * 32767.0 * v);
      }
    }
    if (phase > 2.0 * std::numbers::pi) phase = std::fmod(phase, 2.0 * std::numbers::pi);
  }

  std::string out;
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto put_u16 = [&](std::uint16_t v) {
    for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  std::uint32_t data_bytes = static_cast<std::uint32_t>(pcm.size() * 2);
  out += "RIFF";
  put_u32(36 + data_bytes);
  out += "WAVEfmt ";
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(sample_rate));
  put_u32(static_cast<std::uint32_t>(sample_rate * 2));
  put_u16(2);
  put_u16(16);
  out += "data";
  put_u32(data_bytes);
  for (std::int16_t s : pcm) {
    out.push_back(static_cast<char>(s & 0xff));
    out.push_back(static_cast<char>((s >> 8) & 0xff));
  }
  return out;
}

}  // namespace cantus
