#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kerrkit/datasets.hpp"
#include "kerrkit/error.hpp"

namespace kerrkit {

namespace {

using nlohmann::json;

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".json"; }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_number(const std::string& s, std::size_t offset) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw ParseError("invalid number '" + s + "'", offset);
  return v;
}

json scaling_to_json(const ScalingRecord& s) {
  return {{"mode", to_string(s.mode)},
          {"offsets", std::vector<double>(s.offsets.data(), s.offsets.data() + s.offsets.size())},
          {"scales", std::vector<double>(s.scales.data(), s.scales.data() + s.scales.size())}};
}

ScalingRecord scaling_from_json(const json& j, Eigen::Index d) {
  ScalingRecord s;
  s.mode = parse_scaling_mode(j.at("mode").get<std::string>());
  auto off = j.value("offsets", std::vector<double>{});
  auto sc = j.value("scales", std::vector<double>{});
  if (off.empty()) off.assign(static_cast<std::size_t>(d), 0.0);
  if (sc.empty()) sc.assign(static_cast<std::size_t>(d), 1.0);
  if (static_cast<Eigen::Index>(off.size()) != d || static_cast<Eigen::Index>(sc.size()) != d) {
    throw ParseError("sidecar scaling width does not match the feature count");
  }
  s.offsets = Eigen::Map<Eigen::VectorXd>(off.data(), d);
  s.scales = Eigen::Map<Eigen::VectorXd>(sc.data(), d);
  return s;
}

}  // namespace

void write_dataset(const Dataset& d, const std::string& csv_path) {
  validate(d);
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw Error("cannot write " + csv_path);
  for (Eigen::Index f = 0; f < d.dims(); ++f) out << 'f' << f << ',';
  out << "label\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (Eigen::Index f = 0; f < d.dims(); ++f) {
      out << format_double(d.features(static_cast<Eigen::Index>(i), f)) << ',';
    }
    out << d.labels[i] << '\n';
  }
  if (!out) throw Error("write failed for " + csv_path);

  ScalingRecord scaling = d.scaling;
  if (scaling.offsets.size() == 0) {
    scaling.offsets = Eigen::VectorXd::Zero(d.dims());
    scaling.scales = Eigen::VectorXd::Ones(d.dims());
  }
  const json side = {{"schema_version", 1},       {"name", d.name},
                     {"seed", d.seed},            {"n", d.size()},
                     {"d", d.dims()},             {"n_train", d.n_train},
                     {"scaling", scaling_to_json(scaling)}};
  std::ofstream sc(sidecar_path(csv_path), std::ios::binary);
  if (!sc) throw Error("cannot write " + sidecar_path(csv_path));
  sc << side.dump(2) << '\n';
}

Dataset read_dataset(const std::string& csv_path) {
  std::ifstream in(csv_path, std::ios::binary);
  if (!in) throw DataUnavailable("dataset file not found: " + csv_path);
  std::string line;
  std::size_t offset = 0;
  if (!std::getline(in, line)) throw ParseError("empty dataset file", 0);
  const auto header = split_fields(line);
  int label_col = -1;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == "label") label_col = static_cast<int>(k);
  }
  if (label_col < 0) throw ParseError("schema error: missing 'label' column", 0);
  const std::size_t width = header.size();
  if (width < 2) throw ParseError("schema error: no feature columns", 0);
  offset += line.size() + 1;

  std::vector<double> values;
  std::vector<int> labels;
  while (std::getline(in, line)) {
    const std::size_t line_start = offset;
    offset += line.size() + 1;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != width) {
      throw ParseError("row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(width),
                       line_start);
    }
    for (std::size_t k = 0; k < width; ++k) {
      const double v = parse_number(fields[k], line_start);
      if (static_cast<int>(k) == label_col) {
        if (v != 0.0 && v != 1.0) throw ParseError("label must be 0 or 1", line_start);
        labels.push_back(static_cast<int>(v));
      } else {
        values.push_back(v);
      }
    }
  }
  Dataset d;
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto dims = static_cast<Eigen::Index>(width - 1);
  d.features = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, dims);
  d.labels = std::move(labels);
  d.name = std::filesystem::path(csv_path).stem().string();

  std::ifstream sc(sidecar_path(csv_path), std::ios::binary);
  if (sc) {
    std::stringstream buf;
    buf << sc.rdbuf();
    json side;
    try {
      side = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid sidecar JSON: ") + e.what(), e.byte);
    }
    d.name = side.value("name", d.name);
    d.seed = side.value("seed", std::uint64_t{0});
    d.n_train = side.value("n_train", std::size_t{0});
    if (side.contains("scaling")) d.scaling = scaling_from_json(side["scaling"], dims);
  }
  validate(d);
  return d;
}

}  // namespace kerrkit
