#pragma once

#include <string>

namespace rvb::io {

inline constexpr const char* kVersion = "0.1.0";

// UTC stamp "YYYY-MM-DDTHH:MM:SSZ". Honors SOURCE_DATE_EPOCH; without it the
// epoch itself is used so that repeated runs stay byte-identical.
std::string timestamp_utc();

// Locale-independent float formats used by the CSV writers.
std::string format_fixed(double v, int precision);
std::string format_sci(double v, int precision);

// format_sci plus the "inf" sentinel for infinite ratios.
std::string format_ratio(double v, int precision);

// Writes through a temp file in the target directory, then renames, so a
// crash never leaves a half-written output behind.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace rvb::io
