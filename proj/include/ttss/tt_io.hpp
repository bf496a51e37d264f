#pragma once

#include <iosfwd>
#include <string>

#include "ttss/tensor_train.hpp"

namespace ttss {

// "TTS2" container: magic, version byte, kind byte (0 vector, 1 operator),
// u64 d, u64 mode sizes (operators: row then column size per core),
// u64 ranks (d+1), then each core's entries in row-major order as
// little-endian IEEE-754 doubles.
inline constexpr unsigned char kTtsVersion = 1;

void write_tt(std::ostream& os, const TTVector& v);
void write_tt(std::ostream& os, const TTOperator& op);
TTVector read_tt_vector(std::istream& is);
TTOperator read_tt_operator(std::istream& is);

void save_tt(const std::string& path, const TTVector& v);
void save_tt(const std::string& path, const TTOperator& op);
TTVector load_tt_vector(const std::string& path);
TTOperator load_tt_operator(const std::string& path);

}  // namespace ttss
