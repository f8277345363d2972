#pragma once

#include "copulakde/model.hpp"

#include <string>

namespace ckde {
namespace io {

inline constexpr const char* model_magic = "copulakde model";
inline constexpr int model_format_version = 1;

//! writes the fitted model to a versioned JSON file; all numeric content
//! is stored as full-precision decimal text so a reload reproduces every
//! density evaluation bit-exactly.
void save_model(const FittedCopula& model, const std::string& path);

//! reads a model file; rejects wrong magic strings or format versions.
FittedCopula load_model(const std::string& path);

} // namespace io
} // namespace ckde
