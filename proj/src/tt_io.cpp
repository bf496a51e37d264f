#include "ttss/tt_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ttss/errors.hpp"

namespace ttss {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'S', '2'};
constexpr std::uint64_t kMaxDims = 4096;
constexpr std::uint64_t kMaxSize = std::uint64_t(1) << 34;

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) throw Error("TTS2: truncated stream");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void put_header(std::ostream& os, unsigned char kind) {
  os.write(kMagic, 4);
  os.put(static_cast<char>(kTtsVersion));
  os.put(static_cast<char>(kind));
}

void get_header(std::istream& is, unsigned char want_kind) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) throw Error("TTS2: bad magic");
  int version = is.get();
  int kind = is.get();
  if (!is) throw Error("TTS2: truncated header");
  if (version != kTtsVersion) throw Error("TTS2: unsupported version " + std::to_string(version));
  if (kind != want_kind) throw Error("TTS2: object kind mismatch");
}

std::uint64_t checked(std::uint64_t v, std::uint64_t limit, const char* what) {
  if (v == 0 || v > limit) throw Error(std::string("TTS2: implausible ") + what);
  return v;
}

}  // namespace

void write_tt(std::ostream& os, const TTVector& v) {
  put_header(os, 0);
  put_u64(os, v.dims());
  for (int n : v.modes()) put_u64(os, n);
  for (int r : v.ranks()) put_u64(os, r);
  for (const auto& c : v.cores())
    for (int a = 0; a < c.r0(); ++a)
      for (int i = 0; i < c.n(); ++i)
        for (int b = 0; b < c.r1(); ++b) put_f64(os, c(a, i, b));
  if (!os) throw Error("TTS2: write failed");
}

void write_tt(std::ostream& os, const TTOperator& op) {
  put_header(os, 1);
  put_u64(os, op.dims());
  for (const auto& c : op.cores()) {
    put_u64(os, c.m());
    put_u64(os, c.n());
  }
  for (int r : op.ranks()) put_u64(os, r);
  for (const auto& c : op.cores())
    for (int a = 0; a < c.r0(); ++a)
      for (int i = 0; i < c.m(); ++i)
        for (int j = 0; j < c.n(); ++j)
          for (int b = 0; b < c.r1(); ++b) put_f64(os, c(a, i, j, b));
  if (!os) throw Error("TTS2: write failed");
}

TTVector read_tt_vector(std::istream& is) {
  get_header(is, 0);
  const std::uint64_t d = checked(get_u64(is), kMaxDims, "dimension count");
  std::vector<int> modes(d), ranks(d + 1);
  for (auto& n : modes) n = static_cast<int>(checked(get_u64(is), kMaxSize, "mode size"));
  for (auto& r : ranks) r = static_cast<int>(checked(get_u64(is), kMaxSize, "rank"));
  std::vector<Core3> cores;
  for (std::uint64_t k = 0; k < d; ++k) {
    if (double(ranks[k]) * modes[k] * ranks[k + 1] > double(kMaxSize)) throw Error("TTS2: core too large");
    Core3 c(ranks[k], modes[k], ranks[k + 1]);
    for (int a = 0; a < c.r0(); ++a)
      for (int i = 0; i < c.n(); ++i)
        for (int b = 0; b < c.r1(); ++b) c(a, i, b) = get_f64(is);
    cores.push_back(std::move(c));
  }
  return TTVector(std::move(cores));
}

TTOperator read_tt_operator(std::istream& is) {
  get_header(is, 1);
  const std::uint64_t d = checked(get_u64(is), kMaxDims, "dimension count");
  std::vector<int> rows(d), cols(d), ranks(d + 1);
  for (std::uint64_t k = 0; k < d; ++k) {
    rows[k] = static_cast<int>(checked(get_u64(is), kMaxSize, "mode size"));
    cols[k] = static_cast<int>(checked(get_u64(is), kMaxSize, "mode size"));
  }
  for (auto& r : ranks) r = static_cast<int>(checked(get_u64(is), kMaxSize, "rank"));
  std::vector<Core4> cores;
  for (std::uint64_t k = 0; k < d; ++k) {
    if (double(ranks[k]) * rows[k] * cols[k] * ranks[k + 1] > double(kMaxSize))
      throw Error("TTS2: core too large");
    Core4 c(ranks[k], rows[k], cols[k], ranks[k + 1]);
    for (int a = 0; a < c.r0(); ++a)
      for (int i = 0; i < c.m(); ++i)
        for (int j = 0; j < c.n(); ++j)
          for (int b = 0; b < c.r1(); ++b) c(a, i, j, b) = get_f64(is);
    cores.push_back(std::move(c));
  }
  return TTOperator(std::move(cores));
}

void save_tt(const std::string& path, const TTVector& v) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_tt(os, v);
}

void save_tt(const std::string& path, const TTOperator& op) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_tt(os, op);
}

TTVector load_tt_vector(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_tt_vector(is);
}

TTOperator load_tt_operator(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  return read_tt_operator(is);
}

}  // namespace ttss
