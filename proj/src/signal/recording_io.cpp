#include "lesvote/recording_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lesvote/error.hpp"

namespace lesvote::io {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    fail(ErrorKind::io, "malformed number '" + std::string(s) + "' in " + context);
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::vector<std::uint8_t> encode_recording(const signal::Recording& rec) {
  std::vector<std::uint8_t> out;
  out.reserve(kRecordingHeaderBytes + rec.data().size() * 8);
  for (char c : {'E', 'E', 'G', 'R'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, kRecordingFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(rec.channels()));
  put_u32(out, 0);
  put_u64(out, rec.samples());
  put_u64(out, std::bit_cast<std::uint64_t>(rec.sample_rate()));
  for (double v : rec.data().data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

signal::Recording decode_recording(const std::vector<std::uint8_t>& bytes) {
  require(bytes.size() >= kRecordingHeaderBytes, ErrorKind::io, "recording file truncated header");
  require(std::memcmp(bytes.data(), "EEGR", 4) == 0, ErrorKind::io, "bad recording magic");
  const auto version = static_cast<std::uint32_t>(get_le(bytes.data() + 4, 4));
  require(version == kRecordingFormatVersion, ErrorKind::io,
          "unsupported recording format version " + std::to_string(version));
  const auto channels = get_le(bytes.data() + 8, 4);
  const auto samples = get_le(bytes.data() + 16, 8);
  const double fs = std::bit_cast<double>(get_le(bytes.data() + 24, 8));
  require(channels >= 1 && samples >= 1, ErrorKind::io, "recording header has empty shape");
  require(bytes.size() == kRecordingHeaderBytes + channels * samples * 8, ErrorKind::io,
          "recording payload size does not match header");

  std::vector<double> data(channels * samples);
  const std::uint8_t* p = bytes.data() + kRecordingHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::bit_cast<double>(get_le(p + 8 * i, 8));
  return signal::Recording(Matrix(channels, samples, std::move(data)), fs);
}

void write_recording_binary(const std::filesystem::path& path, const signal::Recording& rec) {
  const auto bytes = encode_recording(rec);
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorKind::io, "failed writing " + path.string());
}

signal::Recording read_recording_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_recording(bytes);
}

void write_recording_csv(const std::filesystem::path& path, const signal::Recording& rec) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << "sample_rate_hz," << format_double(rec.sample_rate()) << '\n';
  for (std::size_t c = 0; c < rec.channels(); ++c) {
    out << rec.channel_names()[c];
    for (double v : rec.data().row(c)) out << ',' << format_double(v);
    out << '\n';
  }
}

signal::Recording read_recording_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::io, "cannot open " + path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::io, path.string() + " is empty");
  auto header = split_csv_line(line);
  require(header.size() == 2 && header[0] == "sample_rate_hz", ErrorKind::io,
          path.string() + ": first line must be 'sample_rate_hz,<value>'");
  const double fs = parse_double(header[1], path.string());

  std::vector<std::string> names;
  std::vector<double> values;
  std::size_t samples = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    require(fields.size() >= 2, ErrorKind::io, path.string() + ": channel row without samples");
    if (names.empty()) samples = fields.size() - 1;
    require(fields.size() - 1 == samples, ErrorKind::io, path.string() + ": ragged channel rows");
    names.push_back(fields[0]);
    for (std::size_t i = 1; i < fields.size(); ++i) values.push_back(parse_double(fields[i], path.string()));
  }
  require(!names.empty(), ErrorKind::io, path.string() + ": no channel rows");
  Matrix data(names.size(), samples, std::move(values));
  return signal::Recording(std::move(data), fs, std::move(names));
}

signal::Recording read_recording(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return read_recording_csv(path);
  return read_recording_binary(path);
}

void write_spectrum_csv(const std::filesystem::path& path, const signal::SpectrumMatrix& spec) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::io, "cannot open " + path.string() + " for writing");
  out << "channel";
  for (std::size_t j = 0; j < spec.cols(); ++j) out << ',' << format_double(spec.bin_center(j));
  out << '\n';
  for (std::size_t c = 0; c < spec.channels(); ++c) {
    out << spec.channel_names()[c];
    for (double v : spec.data().row(c)) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace lesvote::io
