#include "ptreg/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <json.hpp>

namespace ptreg {
namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void parse_error(const std::string& what) {
  throw std::invalid_argument("parse error: " + what);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

void expect_finite(const Mat& m, const char* what) {
  for (double v : m.data)
    if (!std::isfinite(v))
      throw std::invalid_argument(std::string(what) +
                                  ": non-finite entry not allowed here");
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // also normalizes -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(),
                                   v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    parse_error("bad number '" + token + "'");
  return v;
}

std::string model_to_string(const StackedModel& model) {
  ordered_json doc;
  doc["version"] = 1;
  doc["activation_eps"] = model.activation_eps;
  doc["layers"] = ordered_json::array();
  for (const KrausLayer& layer : model.layers) {
    ordered_json jl;
    jl["p"] = layer.p;
    jl["q"] = layer.q;
    jl["r"] = layer.r();
    jl["kraus"] = ordered_json::array();
    for (const Mat& a : layer.kraus) {
      expect_finite(a, "model_to_string");
      jl["kraus"].push_back(a.data);
    }
    doc["layers"].push_back(std::move(jl));
  }
  return doc.dump() + "\n";
}

StackedModel model_from_string(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    parse_error(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.contains("version") || doc["version"].get<int>() != 1)
    parse_error("model file version must be 1");
  std::vector<KrausLayer> layers;
  for (const auto& jl : doc.at("layers")) {
    const int p = jl.at("p").get<int>();
    const int q = jl.at("q").get<int>();
    const int r = jl.at("r").get<int>();
    const auto& ops = jl.at("kraus");
    if (static_cast<int>(ops.size()) != r)
      parse_error("layer stores " + std::to_string(ops.size()) +
                  " operators but claims r=" + std::to_string(r));
    std::vector<Mat> kraus;
    for (const auto& flat : ops) {
      auto values = flat.get<std::vector<double>>();
      if (values.size() != static_cast<std::size_t>(p) * q)
        parse_error("kraus operator has " + std::to_string(values.size()) +
                    " entries, expected " + std::to_string(p * q));
      kraus.emplace_back(q, p, std::move(values));
    }
    layers.emplace_back(p, q, std::move(kraus));
  }
  StackedModel model(std::move(layers),
                     doc.at("activation_eps").get<double>());
  return model;
}

std::string dataset_to_string(const Dataset& data) {
  std::string out = "ptrds 1 " + std::to_string(data.size()) + " " +
                    std::to_string(data.p) + " " + std::to_string(data.q) +
                    "\n";
  auto append_mat = [&out](const Mat& m) {
    expect_finite(m, "dataset_to_string");
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i) out += ' ';
      out += format_double(m.data[i]);
    }
    out += '\n';
  };
  for (std::size_t i = 0; i < data.size(); ++i) {
    append_mat(data.inputs[i]);
    append_mat(data.targets[i]);
  }
  return out;
}

Dataset dataset_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) parse_error("empty dataset file");
  const auto header = split_ws(line);
  if (header.size() != 5 || header[0] != "ptrds" || header[1] != "1")
    parse_error("bad dataset header '" + line + "'");
  const long count = std::stol(header[2]);
  const int p = std::stoi(header[3]);
  const int q = std::stoi(header[4]);
  if (count < 0 || p < 1 || q < 1) parse_error("bad dataset dimensions");

  Dataset data;
  data.p = p;
  data.q = q;
  auto read_mat = [&](int side) {
    if (!std::getline(in, line)) parse_error("truncated dataset file");
    const auto toks = split_ws(line);
    if (toks.size() != static_cast<std::size_t>(side) * side)
      parse_error("expected " + std::to_string(side * side) +
                  " values, got " + std::to_string(toks.size()));
    Mat m(side, side);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      m.data[i] = parse_double(toks[i]);
      if (std::isnan(m.data[i])) parse_error("nan not allowed in datasets");
    }
    return m;
  };
  for (long i = 0; i < count; ++i) {
    Mat x = read_mat(p);
    Mat y = read_mat(q);
    data.add(std::move(x), std::move(y));
  }
  while (std::getline(in, line))
    if (!split_ws(line).empty()) parse_error("trailing content after body");
  return data;
}

std::string matrix_to_string(const Mat& m) {
  if (!m.square())
    throw std::invalid_argument("matrix_to_string: matrix files are square");
  std::string out = "ptrm 1 " + std::to_string(m.rows) + "\n";
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Mat matrix_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) parse_error("empty matrix file");
  const auto header = split_ws(line);
  if (header.size() != 3 || header[0] != "ptrm" || header[1] != "1")
    parse_error("bad matrix header '" + line + "'");
  const int n = std::stoi(header[2]);
  if (n < 1) parse_error("bad matrix side");
  Mat m(n, n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line)) parse_error("truncated matrix file");
    const auto toks = split_ws(line);
    if (toks.size() != static_cast<std::size_t>(n))
      parse_error("row " + std::to_string(i) + " has " +
                  std::to_string(toks.size()) + " entries, expected " +
                  std::to_string(n));
    for (int j = 0; j < n; ++j) m(i, j) = parse_double(toks[j]);
  }
  while (std::getline(in, line))
    if (!split_ws(line).empty()) parse_error("trailing content after body");
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw std::invalid_argument("failed writing '" + path + "'");
}

void save_model(const StackedModel& model, const std::string& path) {
  write_file(path, model_to_string(model));
}

StackedModel load_model(const std::string& path) {
  return model_from_string(read_file(path));
}

void save_dataset(const Dataset& data, const std::string& path) {
  write_file(path, dataset_to_string(data));
}

Dataset load_dataset(const std::string& path) {
  return dataset_from_string(read_file(path));
}

void save_matrix(const Mat& m, const std::string& path) {
  write_file(path, matrix_to_string(m));
}

Mat load_matrix(const std::string& path) {
  return matrix_from_string(read_file(path));
}

}  // namespace ptreg
