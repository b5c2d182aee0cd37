#pragma once

#include <filesystem>
#include <string>

#include "mta/dataset.hpp"
#include "mta/matrix.hpp"
#include "mta/mlp.hpp"

namespace mta {

// 17 significant digits, enough for an exact round trip.
std::string format_double(double value);
// Whole-token parse; throws InvalidInput on trailing garbage or empty text.
double parse_double(const std::string& text);
int parse_int(const std::string& text);

// Dataset CSV: header f0,…,f{d−1},clean_label[,noisy_label],split. The
// noisy_label column is omitted when the dataset carries no noise.
void write_dataset_csv(const LabeledDataset& ds, const std::filesystem::path& path);
LabeledDataset read_dataset_csv(const std::filesystem::path& path);

// c×c matrix, one row per line, comma separated, no header.
void write_matrix_csv(const DenseMatrix& m, const std::filesystem::path& path);
DenseMatrix read_matrix_csv(const std::filesystem::path& path);

// Text checkpoint: a "mta-mlp 1" magic line, a "dims d0 … dk" line, then each
// weight matrix row-major, one matrix row per line.
void write_checkpoint(const MlpParams& params, const std::filesystem::path& path);
MlpParams read_checkpoint(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace mta
