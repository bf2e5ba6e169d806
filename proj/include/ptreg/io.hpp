#pragma once

#include <string>

#include "ptreg/model.hpp"
#include "ptreg/train.hpp"

namespace ptreg {

/// Shortest decimal that reparses to the same double. Negative zero is
/// normalized to "0" at render time; NaN renders as "nan" (the missing-entry
/// marker in matrix files).
std::string format_double(double v);
double parse_double(const std::string& token);

// ModelFile: JSON {version, activation_eps, layers: [{p, q, r, kraus}]}
// with each kraus entry a row-major q*p array. save -> load -> save is
// byte-identical.
std::string model_to_string(const StackedModel& model);
StackedModel model_from_string(const std::string& text);
void save_model(const StackedModel& model, const std::string& path);
StackedModel load_model(const std::string& path);

// DatasetFile: header "ptrds 1 <count> <p> <q>", then two lines per sample
// (X row-major, Y row-major), space-separated.
std::string dataset_to_string(const Dataset& data);
Dataset dataset_from_string(const std::string& text);
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

// MatrixFile: header "ptrm 1 <n>", then n lines of n entries; missing
// entries are "nan".
std::string matrix_to_string(const Mat& m);
Mat matrix_from_string(const std::string& text);
void save_matrix(const Mat& m, const std::string& path);
Mat load_matrix(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace ptreg
