#include "ieppa/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ieppa/error.hpp"

namespace ieppa {

using nlohmann::json;

namespace {

double NumberFromJson(const json& v, bool allow_inf) {
  if (v.is_number()) return v.get<double>();
  if (allow_inf && v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "Infinity" || s == "+inf") return kInf;
  }
  Fail(ErrorKind::kParse, "expected a number" + std::string(allow_inf ? " or \"inf\"" : "") +
                              ", got " + v.dump());
}

template <class T>
T Get(const json& j, const char* key) {
  if (!j.contains(key)) Fail(ErrorKind::kParse, std::string("missing key \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    Fail(ErrorKind::kParse, std::string("bad value for \"") + key + "\": " + ex.what());
  }
}

}  // namespace

Tensor3 TensorFromJson(const json& j, Dims dims, bool allow_inf) {
  if (!j.is_array()) Fail(ErrorKind::kParse, "tensor must be a flat array");
  if (j.size() != dims.size()) {
    Fail(ErrorKind::kDimensionMismatch, "tensor array has " + std::to_string(j.size()) +
                                            " entries, dims need " +
                                            std::to_string(dims.size()));
  }
  std::vector<double> data;
  data.reserve(j.size());
  for (const auto& v : j) data.push_back(NumberFromJson(v, allow_inf));
  return Tensor3(dims, std::move(data));
}

json TensorToJson(const Tensor3& t) {
  json a = json::array();
  for (double v : t.values()) {
    if (std::isinf(v) && v > 0) {
      a.push_back("inf");
    } else {
      a.push_back(v);
    }
  }
  return a;
}

json InstanceToJson(const Instance& inst) {
  json j;
  j["dims"] = {inst.dims.n1, inst.dims.n2, inst.dims.n3};
  j["cost"] = TensorToJson(inst.cost);
  json blocks = json::array();
  for (const auto& b : inst.blocks) {
    blocks.push_back({{"m", b.m()},
                      {"labels", std::vector<std::int32_t>(b.labels().begin(),
                                                           b.labels().end())}});
  }
  j["blocks"] = std::move(blocks);
  j["rhs"] = inst.rhs;
  j["upper"] = inst.upper ? TensorToJson(*inst.upper) : json(nullptr);
  return j;
}

Instance InstanceFromJson(const json& j) {
  if (!j.is_object()) Fail(ErrorKind::kParse, "instance must be a JSON object");
  const auto d = Get<std::vector<std::size_t>>(j, "dims");
  if (d.size() != 3) Fail(ErrorKind::kParse, "dims must have three entries");
  Instance inst;
  inst.dims = Dims{d[0], d[1], d[2]};
  if (inst.dims.size() == 0) Fail(ErrorKind::kParse, "dims must be positive");
  inst.cost = TensorFromJson(j.at("cost"), inst.dims, false);
  if (!j.contains("blocks") || !j.at("blocks").is_array()) {
    Fail(ErrorKind::kParse, "missing \"blocks\" array");
  }
  for (const auto& b : j.at("blocks")) {
    inst.blocks.emplace_back(inst.dims, Get<std::size_t>(b, "m"),
                             Get<std::vector<std::int32_t>>(b, "labels"));
  }
  inst.rhs = Get<std::vector<std::vector<double>>>(j, "rhs");
  if (j.contains("upper") && !j.at("upper").is_null()) {
    inst.upper = TensorFromJson(j.at("upper"), inst.dims, true);
  }
  inst.Validate(false);
  return inst;
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& ex) {
    Fail(ErrorKind::kParse, path.string() + ": " + ex.what());
  }
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) Fail(ErrorKind::kIo, "write failed for " + path.string());
}

}  // namespace ieppa
