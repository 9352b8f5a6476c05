// nnet/checkpoint.cpp

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

#include "cantus/checkpoint.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cantus {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "cantus-checkpoint";
constexpr int kVersion = 1;

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json network_to_json(const Network& net) {
  json j;
  j["input_dim"] = net.cfg.input_dim;
  j["hidden_widths"] = net.cfg.hidden_widths;
  j["output_dim"] = net.cfg.output_dim;
  j["activation"] = activation_to_string(net.cfg.hidden_act);
  j["skip_layer"] = net.cfg.skip_layer;
  json layers = json::array();
  for (const auto& layer : net.layers) {
    json l;
    l["rows"] = layer.w.rows;
    l["cols"] = layer.w.cols;
    l["w"] = layer.w.data;
    l["b"] = layer.b;
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  return j;
}

Network network_from_json(const json& j) {
  NetworkConfig cfg;
  cfg.input_dim = j.at("input_dim").get<int>();
  cfg.hidden_widths = j.at("hidden_widths").get<std::vector<int>>();
  cfg.output_dim = j.at("output_dim").get<int>();
  cfg.hidden_act = activation_from_string(j.at("activation").get<std::string>());
  cfg.skip_layer = j.at("skip_layer").get<int>();
  Network net = Network::create(cfg);
  const json& layers = j.at("layers");
  if (layers.size() != net.layers.size())
    throw DataError("checkpoint: layer count mismatch");
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const json& jl = layers[l];
    if (jl.at("rows").get<std::size_t>() != net.layers[l].w.rows ||
        jl.at("cols").get<std::size_t>() != net.layers[l].w.cols)
      throw DataError("checkpoint: layer shape mismatch");
    net.layers[l].w.data = jl.at("w").get<std::vector<double>>();
    net.layers[l].b = jl.at("b").get<std::vector<double>>();
    if (net.layers[l].w.data.size() != net.layers[l].w.rows * net.layers[l].w.cols ||
        net.layers[l].b.size() != net.layers[l].w.rows)
      throw DataError("checkpoint: parameter size mismatch");
  }
  return net;
}

json header(const std::string& kind, std::uint64_t schema_hash) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["kind"] = kind;
  j["schema_hash"] = hash_hex(schema_hash);
  return j;
}

json load_and_check(const std::string& path, const std::string& kind,
                    std::uint64_t schema_hash) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("checkpoint " + path + ": invalid JSON: " + e.what());
  }
  if (j.value("format", "") != kFormat)
    throw DataError("checkpoint " + path + ": not a cantus checkpoint");
  if (j.value("version", -1) != kVersion)
    throw DataError("checkpoint " + path + ": unsupported version");
  if (j.value("kind", "") != kind)
    throw DataError("checkpoint " + path + ": kind is `" + j.value("kind", "") +
                    "`, expected `" + kind + "`");
  if (j.value("schema_hash", "") != hash_hex(schema_hash))
    throw DataError("checkpoint " + path +
                    ": schema hash mismatch (model was trained with a different feature schema)");
  return j;
}

json windows_to_json(const WindowSet& ws) {
  json arr = json::array();
  for (const auto& w : ws.windows) {
    arr.push_back({{"taps", w.taps}, {"left_offset", w.left_offset}});
  }
  return arr;
}

WindowSet windows_from_json(const json& arr) {
  WindowSet ws;
  for (const auto& jw : arr) {
    ws.windows.push_back({jw.at("taps").get<std::vector<double>>(),
                          jw.at("left_offset").get<int>()});
  }
  return ws;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write file: " + tmp);
    out << content;
    if (!out) throw ConfigError("short write: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot rename " + tmp + " to " + path);
}

void save_network_checkpoint(const std::string& path, const std::string& kind,
                             const Network& net, std::uint64_t schema_hash) {
  json j = header(kind, schema_hash);
  j["net"] = network_to_json(net);
  write_file_atomic(path, j.dump(1));
}

Network load_network_checkpoint(const std::string& path, const std::string& kind,
                                std::uint64_t schema_hash) {
  json j = load_and_check(path, kind, schema_hash);
  return network_from_json(j.at("net"));
}

void save_acoustic_checkpoint(const std::string& path, const AcousticModel& model,
                              std::uint64_t schema_hash) {
  json j = header("acoustic", schema_hash);
  j["net"] = network_to_json(model.net);
  json streams = json::array();
  for (const auto& s : model.layout.streams) {
    streams.push_back({{"name", s.name}, {"dim", s.dim}, {"is_f0", s.is_f0}});
  }
  j["streams"] = std::move(streams);
  j["windows"] = windows_to_json(model.windows);
  j["criterion"] = criterion_to_string(model.crit);
  j["gv_static"] = model.gv_static.var;
  j["gv_dynamic"] = model.gv_dynamic.var;
  j["prior"] = {{"sigma_p", model.prior.enabled() ? json(model.prior.sigma_p) : json()},
                {"w_max", model.prior.w_max},
                {"ramp", model.prior.ramp}};
  j["bias"] = model.bias;
  write_file_atomic(path, j.dump(1));
}

AcousticModel load_acoustic_checkpoint(const std::string& path,
                                       std::uint64_t schema_hash) {
  json j = load_and_check(path, "acoustic", schema_hash);
  AcousticModel model;
  model.net = network_from_json(j.at("net"));
  for (const auto& js : j.at("streams")) {
    model.layout.streams.push_back({js.at("name").get<std::string>(),
                                    js.at("dim").get<int>(),
                                    js.at("is_f0").get<bool>()});
  }
  model.windows = windows_from_json(j.at("windows"));
  model.crit = criterion_from_string(j.at("criterion").get<std::string>());
  model.gv_static.var = j.at("gv_static").get<std::vector<double>>();
  model.gv_dynamic.var = j.at("gv_dynamic").get<std::vector<double>>();
  const json& jp = j.at("prior");
  model.prior.sigma_p = jp.at("sigma_p").is_null()
                            ? std::numeric_limits<double>::infinity()
                            : jp.at("sigma_p").get<double>();
  model.prior.w_max = jp.at("w_max").get<double>();
  model.prior.ramp = jp.at("ramp").get<int>();
  model.bias = j.at("bias").get<std::vector<double>>();
  return model;
}

}  // namespace cantus
