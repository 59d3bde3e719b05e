#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lesvote/signal.hpp"

namespace lesvote::io {

// Binary recording layout (all little-endian):
//   0  char[4]  magic "EEGR"
//   4  uint32   format version (1)
//   8  uint32   channel count C
//  12  uint32   reserved, zero
//  16  uint64   samples per channel
//  24  float64  sample rate in Hz
//  32  float64  C * samples values, channel-major
inline constexpr std::uint32_t kRecordingFormatVersion = 1;
inline constexpr std::size_t kRecordingHeaderBytes = 32;

std::vector<std::uint8_t> encode_recording(const signal::Recording& rec);
signal::Recording decode_recording(const std::vector<std::uint8_t>& bytes);

void write_recording_binary(const std::filesystem::path& path, const signal::Recording& rec);
signal::Recording read_recording_binary(const std::filesystem::path& path);

// CSV layout: first line "sample_rate_hz,<fs>", then one line per channel:
// "<channel name>,<v0>,<v1>,...". Values use 17 significant digits.
void write_recording_csv(const std::filesystem::path& path, const signal::Recording& rec);
signal::Recording read_recording_csv(const std::filesystem::path& path);

/// Chooses the reader by extension: ".csv" or anything else as binary.
signal::Recording read_recording(const std::filesystem::path& path);

// Spectrum CSV: header "channel,<f_0>,...,<f_{cols-1}>" with bin centres in Hz,
// then "<channel name>,<psd...>" per channel.
void write_spectrum_csv(const std::filesystem::path& path, const signal::SpectrumMatrix& spec);

}  // namespace lesvote::io
