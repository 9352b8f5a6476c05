// tools/main.cpp

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

// cantus: singing-voice parameter pipeline CLI.
//
// Subcommands: parse, features, train, generate, eval, synthdata, plot.
// Exit codes: 0 ok, 2 config error, 3 data error, 4 numeric failure.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "cantus/checkpoint.h"
#include "cantus/kernels.h"
#include "cantus/musicxml.h"
#include "cantus/pipeline.h"
#include "cantus/svgplot.h"

namespace fs = std::filesystem;
using namespace cantus;

namespace {

std::string format_cents_file(const std::vector<double>& cents) {
  std::ostringstream out;
  char buf[64];
  for (double c : cents) {
    std::snprintf(buf, sizeof buf, "%.9g\n", c);
    out << buf;
  }
  return out.str();
}

std::string format_hz_file(const std::vector<double>& cents,
                           const std::vector<std::uint8_t>& voiced) {
  std::ostringstream out;
  char buf[64];
  for (std::size_t t = 0; t < cents.size(); ++t) {
    double hz = voiced[t] ? cents_to_hz(cents[t]) : 0.0;
    std::snprintf(buf, sizeof buf, "%.6f\n", hz);
    out << buf;
  }
  return out.str();
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct CommonArgs {
  std::string config_path;
  int jobs = 1;
};

int run_parse(const std::string& path, const std::string& inventory_path,
              double default_tempo, const std::string& language) {
  PhonemeInventory inv = inventory_path.empty() ? PhonemeInventory::default_japanese()
                                                : PhonemeInventory::load(inventory_path);
  MusicXmlOptions opts;
  opts.default_tempo_bpm = default_tempo;
  Score score = resolve_long_vowels(load_musicxml(path, inv, opts),
                                    LongVowelRules::by_id(language));
  score.validate();
  nlohmann::json j;
  j["tempo_bpm"] = score.tempo_bpm;
  j["frame_shift_s"] = score.frame_shift_s;
  j["total_frames"] = score.total_frames();
  nlohmann::json notes = nlohmann::json::array();
  for (const auto& n : score.notes) {
    nlohmann::json jn;
    jn["index"] = n.index;
    jn["rest"] = n.is_rest();
    if (!n.is_rest()) jn["midi_pitch"] = n.midi_pitch;
    jn["length_frames"] = n.length_frames;
    if (!n.syllable.empty()) jn["syllable"] = n.syllable;
    std::vector<std::string> ph;
    for (const auto& p : n.phonemes) ph.push_back(p.symbol);
    jn["phonemes"] = ph;
    if (n.slur) jn["slur"] = true;
    if (n.breath_mark) jn["breath_mark"] = true;
    if (n.long_vowel_symbol) jn["long_vowel_symbol"] = true;
    notes.push_back(std::move(jn));
  }
  j["notes"] = std::move(notes);
  std::cout << j.dump(1) << "\n";
  return 0;
}

int run_features(const CommonArgs& common) {
  ProjectConfig cfg = ProjectConfig::load(common.config_path);
  ProjectData data = load_project_data(cfg);
  fs::create_directories(cfg.output_dir);
  parallel_for(data.songs.size(), common.jobs, [&](std::size_t i) {
    Matrix m = encode_frame_features(data.songs[i].score, data.schema,
                                     data.songs[i].alignment);
    std::ostringstream out;
    char buf[64];
    for (std::size_t t = 0; t < m.rows; ++t) {
      for (std::size_t d = 0; d < m.cols; ++d) {
        std::snprintf(buf, sizeof buf, "%.9g%c", m.at(t, d), d + 1 == m.cols ? '\n' : ' ');
        out << buf;
      }
    }
    write_file_atomic((fs::path(cfg.output_dir) / (data.names[i] + ".feats")).string(),
                      out.str());
  });
  std::cout << "wrote frame features for " << data.songs.size() << " songs to "
            << cfg.output_dir << "\n";
  return 0;
}

int run_train(const CommonArgs& common, const std::string& which) {
  ProjectConfig cfg = ProjectConfig::load(common.config_path);
  fs::create_directories(cfg.checkpoint_dir);
  std::string out = (fs::path(cfg.checkpoint_dir) / (which + ".json")).string();
  if (which == "timelag") cmd_train_timelag(cfg, out);
  else if (which == "duration") cmd_train_duration(cfg, out);
  else if (which == "acoustic") cmd_train_acoustic(cfg, out);
  else throw ConfigError("train: unknown model `" + which + "`");
  std::cout << "wrote " << out << "\n";
  return 0;
}

int run_generate(const CommonArgs& common, bool preview_tone) {
  ProjectConfig cfg = ProjectConfig::load(common.config_path);
  ProjectData data = load_project_data(cfg, /*need_f0=*/false, /*need_labels=*/false);
  std::uint64_t schema_hash = data.schema.hash();
  Network timelag = load_network_checkpoint(
      (fs::path(cfg.checkpoint_dir) / "timelag.json").string(), "timelag", schema_hash);
  Network duration = load_network_checkpoint(
      (fs::path(cfg.checkpoint_dir) / "duration.json").string(), "duration", schema_hash);
  AcousticModel acoustic = load_acoustic_checkpoint(
      (fs::path(cfg.checkpoint_dir) / "acoustic.json").string(), schema_hash);
  fs::create_directories(cfg.output_dir);

  parallel_for(data.songs.size(), common.jobs, [&](std::size_t i) {
    GenerationResult gen =
        generate_song(data.songs[i].score, timelag, duration, acoustic, data.schema,
                      cfg.timing_repair, cfg.vibrato_scale);
    fs::path base = fs::path(cfg.output_dir) / data.names[i];
    write_file_atomic(base.string() + ".f0", format_hz_file(gen.f0.f0, gen.voiced));
    write_file_atomic(base.string() + "_cents.txt", format_cents_file(gen.f0.f0));
    write_file_atomic(base.string() + "_cents_novib.txt",
                      format_cents_file(gen.f0.f0_no_vib));
    write_file_atomic(base.string() + ".lab", gen.alignment.to_label_text());
    if (preview_tone) {
      std::vector<double> hz(gen.f0.f0.size(), 0.0);
      for (std::size_t t = 0; t < hz.size(); ++t) {
        if (gen.voiced[t]) hz[t] = cents_to_hz(gen.f0.f0[t]);
      }
      write_file_atomic(base.string() + "_preview.wav",
                        render_preview_tone_wav(hz, cfg.frame_shift_s));
    }
  });
  std::cout << "generated " << data.songs.size() << " songs into " << cfg.output_dir << "\n";
  return 0;
}

int run_eval(const CommonArgs& common) {
  ProjectConfig cfg = ProjectConfig::load(common.config_path);
  ProjectData data = load_project_data(cfg, /*need_f0=*/true, /*need_labels=*/true);
  fs::create_directories(cfg.report_dir);

  for (std::size_t i = 0; i < data.songs.size(); ++i) {
    fs::path gen_base = fs::path(cfg.output_dir) / data.names[i];
    std::string cents_path = gen_base.string() + "_cents.txt";
    std::ifstream in(cents_path);
    if (!in) throw DataError("missing generated track: " + cents_path + " (run generate first)");
    std::vector<double> gen_cents;
    double v;
    while (in >> v) gen_cents.push_back(v);
    PhonemeAlignment gen_align = PhonemeAlignment::load(gen_base.string() + ".lab");

    std::vector<std::uint8_t> voiced(gen_cents.size(), 1);
    for (const auto& seg : gen_align.segments) {
      if (seg.phoneme == "sil") {
        for (int t = seg.start_frame; t < seg.end_frame; ++t) voiced[t] = 0;
      }
    }

    const F0Track* natural = nullptr;
    F0Track nat;
    if (data.songs[i].f0.frames() == static_cast<int>(gen_cents.size())) {
      nat = data.songs[i].f0;
      natural = &nat;
    }
    MetricsReport report =
        evaluate_f0(gen_cents, voiced, data.songs[i].score, gen_align, natural);
    if (!data.songs[i].alignment.segments.empty() &&
        data.songs[i].alignment.segments.size() == gen_align.segments.size()) {
      report.duration =
          duration_metrics(data.songs[i].score, gen_align, data.songs[i].alignment);
    }
    write_file_atomic((fs::path(cfg.report_dir) / (data.names[i] + ".txt")).string(),
                      report.to_text());
    write_file_atomic((fs::path(cfg.report_dir) / (data.names[i] + ".json")).string(),
                      report.to_json());
    std::cout << data.names[i] << ":\n" << report.to_text();
  }
  return 0;
}

int run_synthdata(const std::string& spec_path, const std::string& out_dir) {
  SynthdataOptions options;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw ConfigError("cannot open synthdata spec: " + spec_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("synthdata spec: invalid JSON: ") + e.what());
    }
    CorpusSpec& c = options.corpus;
    c.num_songs = j.value("num_songs", c.num_songs);
    c.notes_per_song = j.value("notes_per_song", c.notes_per_song);
    c.min_note_frames = j.value("min_note_frames", c.min_note_frames);
    c.max_note_frames = j.value("max_note_frames", c.max_note_frames);
    c.midi_low = j.value("midi_low", c.midi_low);
    c.midi_high = j.value("midi_high", c.midi_high);
    c.rest_probability = j.value("rest_probability", c.rest_probability);
    c.rest_frames = j.value("rest_frames", c.rest_frames);
    c.detune_sigma_cents = j.value("detune_sigma_cents", c.detune_sigma_cents);
    c.vibrato_probability = j.value("vibrato_probability", c.vibrato_probability);
    c.vibrato_amp_cents = j.value("vibrato_amp_cents", c.vibrato_amp_cents);
    c.vibrato_rate_hz = j.value("vibrato_rate_hz", c.vibrato_rate_hz);
    c.overshoot_cents = j.value("overshoot_cents", c.overshoot_cents);
    c.preparation_cents = j.value("preparation_cents", c.preparation_cents);
    c.noise_sigma_cents = j.value("noise_sigma_cents", c.noise_sigma_cents);
    c.lag_sigma_frames = j.value("lag_sigma_frames", c.lag_sigma_frames);
    c.consonant_jitter_frames = j.value("consonant_jitter_frames", c.consonant_jitter_frames);
    c.mgc_dims = j.value("mgc_dims", c.mgc_dims);
    c.seed = j.value("seed", c.seed);
    options.note_index_labels = j.value("note_index_labels", 0);
  }
  write_synthetic_project(out_dir, options);
  std::cout << "wrote synthetic project to " << out_dir << "\n";
  return 0;
}

int run_plot(const CommonArgs& common, const std::string& song_name,
             const std::string& out_path) {
  ProjectConfig cfg = ProjectConfig::load(common.config_path);
  ProjectData data = load_project_data(cfg, /*need_f0=*/true, /*need_labels=*/true);
  for (std::size_t i = 0; i < data.songs.size(); ++i) {
    if (!song_name.empty() && data.names[i] != song_name) continue;
    fs::path gen_base = fs::path(cfg.output_dir) / data.names[i];

    std::vector<PlotSeries> series;
    NotePitchSequence p = note_pitch_sequence(data.songs[i].score);
    series.push_back({"note-pitch", p.cents});

    auto read_cents = [](const std::string& path) {
      std::vector<double> v;
      std::ifstream in(path);
      double x;
      while (in >> x) v.push_back(x);
      return v;
    };
    std::vector<double> gen = read_cents(gen_base.string() + "_cents.txt");
    std::vector<double> gen_novib = read_cents(gen_base.string() + "_cents_novib.txt");
    if (!gen_novib.empty()) series.push_back({"f0-novib", gen_novib});
    if (!gen.empty()) series.push_back({"f0", gen});

    if (data.songs[i].f0.frames() > 0) {
      std::vector<double> ref = data.songs[i].f0.cents;
      for (std::size_t t = 0; t < ref.size(); ++t) {
        if (!data.songs[i].f0.voiced[t]) ref[t] = std::nan("");
      }
      series.push_back({"f0-ref", ref});
    }
    std::string path = out_path.empty()
                           ? (fs::path(cfg.report_dir) / (data.names[i] + ".svg")).string()
                           : out_path;
    if (!fs::path(path).parent_path().empty())
      fs::create_directories(fs::path(path).parent_path());
    write_file_atomic(path, render_f0_svg(series, data.names[i]));
    std::cout << "wrote " << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"singing-voice parameter pipeline"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string kernels_backend;
  app.add_option("--kernels", kernels_backend, "force kernel backend (scalar|avx2)");

  auto* parse_cmd = app.add_subcommand("parse", "parse a MusicXML score and dump it as JSON");
  std::string parse_path, parse_inventory, parse_language = "jp";
  double parse_tempo = 0.0;
  parse_cmd->add_option("score", parse_path, "MusicXML file")->required();
  parse_cmd->add_option("--inventory", parse_inventory, "phoneme inventory file");
  parse_cmd->add_option("--tempo", parse_tempo, "default tempo when the file has none");
  parse_cmd->add_option("--language", parse_language, "long-vowel rule set (jp|en)");

  auto* features_cmd = app.add_subcommand("features", "write frame-level feature files");
  features_cmd->add_option("-c,--config", common.config_path, "project config")->required();
  features_cmd->add_option("-j,--jobs", common.jobs, "parallel songs");

  auto* train_cmd = app.add_subcommand("train", "train a model (timelag|duration|acoustic)");
  std::string train_which;
  train_cmd->add_option("model", train_which, "timelag|duration|acoustic")->required();
  train_cmd->add_option("-c,--config", common.config_path, "project config")->required();

  auto* generate_cmd = app.add_subcommand("generate", "run the full synthesis pipeline");
  bool preview_tone = false;
  generate_cmd->add_option("-c,--config", common.config_path, "project config")->required();
  generate_cmd->add_option("-j,--jobs", common.jobs, "parallel songs");
  generate_cmd->add_flag("--preview-tone", preview_tone,
                         "also render a harmonic preview tone WAV (debug aid)");

  auto* eval_cmd = app.add_subcommand("eval", "objective metrics for generated songs");
  eval_cmd->add_option("-c,--config", common.config_path, "project config")->required();

  auto* synthdata_cmd = app.add_subcommand("synthdata", "emit a synthetic dataset");
  std::string synth_spec, synth_out;
  synthdata_cmd->add_option("--spec", synth_spec, "corpus spec JSON");
  synthdata_cmd->add_option("-o,--out", synth_out, "output directory")->required();

  auto* plot_cmd = app.add_subcommand("plot", "SVG F0 contour plot");
  std::string plot_song, plot_out;
  plot_cmd->add_option("-c,--config", common.config_path, "project config")->required();
  plot_cmd->add_option("--song", plot_song, "song name (default: all)");
  plot_cmd->add_option("-o,--out", plot_out, "output SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!kernels_backend.empty()) kernels::force_backend(kernels_backend.c_str());
    if (parse_cmd->parsed())
      return run_parse(parse_path, parse_inventory, parse_tempo, parse_language);
    if (features_cmd->parsed()) return run_features(common);
    if (train_cmd->parsed()) return run_train(common, train_which);
    if (generate_cmd->parsed()) return run_generate(common, preview_tone);
    if (eval_cmd->parsed()) return run_eval(common);
    if (synthdata_cmd->parsed()) return run_synthdata(synth_spec, synth_out);
    if (plot_cmd->parsed()) return run_plot(common, plot_song, plot_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
