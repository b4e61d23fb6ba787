#pragma once

#include <string>

namespace towlab {

/// Full-precision, locale-independent double formatting ("%.17g"); the
/// same bit pattern always yields the same string, which is what keeps
/// emitted files byte-reproducible.
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

} // namespace towlab
