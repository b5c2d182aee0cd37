#include "mta/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mta/error.hpp"

namespace mta {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || text.empty()) {
    throw InvalidInput("not a number: '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& text) {
  int value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
    throw InvalidInput("not an integer: '" + text + "'");
  }
  return value;
}

void write_dataset_csv(const LabeledDataset& ds, const std::filesystem::path& path) {
  ds.validate();
  auto out = open_for_write(path);
  for (std::size_t j = 0; j < ds.features.cols(); ++j) out << 'f' << j << ',';
  out << "clean_label,";
  if (ds.noisy_labels) out << "noisy_label,";
  out << "split\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.features.row(i)) out << format_double(v) << ',';
    out << ds.clean_labels[i] << ',';
    if (ds.noisy_labels) out << (*ds.noisy_labels)[i] << ',';
    out << to_string(ds.split[i]) << '\n';
  }
  finish_write(out, path);
}

LabeledDataset read_dataset_csv(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "empty dataset file");
  const auto header = split_csv_line(strip_cr(line));
  std::size_t n_features = 0;
  while (n_features < header.size() && header[n_features] == "f" + std::to_string(n_features)) {
    ++n_features;
  }
  std::size_t col = n_features;
  if (n_features == 0 || col >= header.size() || header[col] != "clean_label") {
    throw ParseError(1, "header must be f0,...,clean_label[,noisy_label],split");
  }
  ++col;
  const bool has_noisy = col < header.size() && header[col] == "noisy_label";
  if (has_noisy) ++col;
  if (col + 1 != header.size() || header[col] != "split") {
    throw ParseError(1, "header must end with split");
  }
  const std::size_t n_cols = header.size();

  std::vector<double> features;
  LabeledDataset ds;
  std::vector<int> noisy;
  std::size_t line_no = 1;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != n_cols) {
      throw ParseError(line_no, "expected " + std::to_string(n_cols) + " fields, got " +
                                    std::to_string(cells.size()));
    }
    try {
      for (std::size_t j = 0; j < n_features; ++j) {
        const double v = parse_double(cells[j]);
        if (!std::isfinite(v)) throw InvalidInput("non-finite feature");
        features.push_back(v);
      }
      const int y = parse_int(cells[n_features]);
      if (y < 0) throw InvalidInput("negative label");
      ds.clean_labels.push_back(y);
      max_label = std::max(max_label, y);
      if (has_noisy) {
        const int z = parse_int(cells[n_features + 1]);
        if (z < 0) throw InvalidInput("negative label");
        noisy.push_back(z);
        max_label = std::max(max_label, z);
      }
      ds.split.push_back(parse_split(cells.back()));
    } catch (const InvalidInput& e) {
      throw ParseError(line_no, e.what());
    }
  }
  ds.features = DenseMatrix(ds.clean_labels.size(), n_features, std::move(features));
  if (has_noisy) ds.noisy_labels = std::move(noisy);
  ds.classes = static_cast<std::size_t>(max_label + 1);
  ds.validate();
  return ds;
}

void write_matrix_csv(const DenseMatrix& m, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  finish_write(out, path);
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string line;
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (rows == 0) cols = cells.size();
    if (cells.size() != cols) throw ParseError(line_no, "ragged matrix row");
    try {
      for (const auto& cell : cells) data.push_back(parse_double(cell));
    } catch (const InvalidInput& e) {
      throw ParseError(line_no, e.what());
    }
    ++rows;
  }
  return DenseMatrix(rows, cols, std::move(data));
}

void write_checkpoint(const MlpParams& params, const std::filesystem::path& path) {
  params.validate();
  auto out = open_for_write(path);
  out << "mta-mlp 1\ndims";
  for (std::size_t d : params.layer_dims) out << ' ' << d;
  out << '\n';
  for (const auto& w : params.weights) {
    for (std::size_t r = 0; r < w.rows(); ++r) {
      for (std::size_t c = 0; c < w.cols(); ++c) {
        if (c) out << ' ';
        out << format_double(w(r, c));
      }
      out << '\n';
    }
  }
  finish_write(out, path);
}

MlpParams read_checkpoint(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || strip_cr(line) != "mta-mlp 1") {
    throw ParseError(line_no, "not an mta-mlp checkpoint");
  }
  ++line_no;
  if (!std::getline(in, line)) throw ParseError(line_no, "missing dims line");
  std::stringstream dims_stream(strip_cr(line));
  std::string token;
  dims_stream >> token;
  if (token != "dims") throw ParseError(line_no, "expected dims line");
  MlpParams params;
  while (dims_stream >> token) {
    try {
      const int d = parse_int(token);
      if (d <= 0) throw InvalidInput("non-positive dim");
      params.layer_dims.push_back(static_cast<std::size_t>(d));
    } catch (const InvalidInput& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (params.layer_dims.size() < 2) throw ParseError(line_no, "need at least two dims");
  for (std::size_t i = 0; i + 1 < params.layer_dims.size(); ++i) {
    DenseMatrix w(params.layer_dims[i + 1], params.layer_dims[i]);
    for (std::size_t r = 0; r < w.rows(); ++r) {
      ++line_no;
      if (!std::getline(in, line)) throw ParseError(line_no, "truncated checkpoint");
      std::stringstream row(strip_cr(line));
      std::size_t c = 0;
      while (row >> token) {
        if (c >= w.cols()) throw ParseError(line_no, "too many values");
        try {
          w(r, c++) = parse_double(token);
        } catch (const InvalidInput& e) {
          throw ParseError(line_no, e.what());
        }
      }
      if (c != w.cols()) throw ParseError(line_no, "too few values");
    }
    params.weights.push_back(std::move(w));
  }
  return params;
}

std::string read_text_file(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  auto out = open_for_write(path);
  out << contents;
  finish_write(out, path);
}

}  // namespace mta
