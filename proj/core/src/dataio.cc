// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chansel/dataio.h"

#include <openssl/evp.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "chansel/error.h"
#include "json.hpp"

namespace chansel {
namespace {

using json = nlohmann::json;

void put_u32le(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff),
                         static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff),
                         static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

// Reads up to n bytes; returns how many arrived.
std::size_t read_some(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> default_names(int n_channels) {
  std::vector<std::string> names;
  if (n_channels <= 22) {
    auto all = bci_iv_2a_channel_names();
    names.assign(all.begin(), all.begin() + n_channels);
  } else {
    for (int i = 0; i < n_channels; ++i) names.push_back("E" + std::to_string(i + 1));
  }
  return names;
}

}  // namespace

EtsHeader header_of(const TrialSet& trials) {
  EtsHeader h;
  h.n_trials = trials.n_trials();
  h.n_channels = trials.n_channels();
  h.n_samples = trials.n_samples();
  h.fs_hz = trials.montage().fs_hz();
  h.channel_names = trials.montage().channel_names();
  h.labels = trials.labels();
  return h;
}

std::string encode_header(const EtsHeader& header) {
  json doc;
  doc["n_trials"] = header.n_trials;
  doc["n_channels"] = header.n_channels;
  doc["n_samples"] = header.n_samples;
  doc["fs_hz"] = header.fs_hz;
  doc["channel_names"] = header.channel_names;
  doc["labels"] = header.labels;
  doc["dtype"] = header.dtype;
  doc["layout"] = header.layout;
  return doc.dump();
}

EtsHeader decode_header(std::string_view text) {
  EtsHeader h;
  try {
    const json doc = json::parse(text);
    h.n_trials = doc.at("n_trials").get<int>();
    h.n_channels = doc.at("n_channels").get<int>();
    h.n_samples = doc.at("n_samples").get<int>();
    h.fs_hz = doc.at("fs_hz").get<double>();
    h.channel_names = doc.at("channel_names").get<std::vector<std::string>>();
    h.labels = doc.at("labels").get<std::vector<ClassId>>();
    h.dtype = doc.at("dtype").get<std::string>();
    h.layout = doc.at("layout").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kHeaderParse, e.what());
  }
  if (h.dtype != kEtsDtype) {
    throw Error(ErrorCode::kHeaderParse, "unsupported dtype " + h.dtype);
  }
  if (h.layout != kEtsLayout) {
    throw Error(ErrorCode::kHeaderParse, "unsupported layout " + h.layout);
  }
  if (h.n_trials < 1 || h.n_channels < 1 || h.n_samples < 1) {
    throw Error(ErrorCode::kHeaderParse, "counts must be positive");
  }
  if (static_cast<int>(h.channel_names.size()) != h.n_channels) {
    throw Error(ErrorCode::kHeaderParse, "channel_names length != n_channels");
  }
  if (static_cast<int>(h.labels.size()) != h.n_trials) {
    throw Error(ErrorCode::kHeaderParse, "labels length != n_trials");
  }
  return h;
}

std::size_t write_ets(const TrialSet& trials, std::ostream& sink) {
  const std::string header = encode_header(header_of(trials));
  sink.write(kEtsMagic, 4);
  put_u32le(sink, static_cast<std::uint32_t>(header.size()));
  sink.write(header.data(), static_cast<std::streamsize>(header.size()));

  const auto& samples = trials.samples();
  std::string payload(samples.size() * 4, '\0');
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(samples[i]);
    payload[4 * i] = static_cast<char>(bits & 0xff);
    payload[4 * i + 1] = static_cast<char>((bits >> 8) & 0xff);
    payload[4 * i + 2] = static_cast<char>((bits >> 16) & 0xff);
    payload[4 * i + 3] = static_cast<char>((bits >> 24) & 0xff);
  }
  sink.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!sink) throw Error(ErrorCode::kIoError, "write failed");
  return 8 + header.size() + payload.size();
}

TrialSet read_ets(std::istream& source) {
  char prefix[8];
  const std::size_t got = read_some(source, prefix, 4);
  if (got < 4 || !std::equal(prefix, prefix + 4, kEtsMagic)) {
    throw Error(ErrorCode::kBadMagic, "stream does not start with ETS1");
  }
  if (read_some(source, prefix + 4, 4) < 4) {
    throw Error(ErrorCode::kHeaderParse, "missing header length");
  }
  const std::uint32_t header_len =
      get_u32le(reinterpret_cast<const unsigned char*>(prefix + 4));
  std::string header_text(header_len, '\0');
  if (read_some(source, header_text.data(), header_len) < header_len) {
    throw Error(ErrorCode::kHeaderParse, "truncated header");
  }
  EtsHeader h = decode_header(header_text);

  const std::size_t n_values = static_cast<std::size_t>(h.n_trials) *
                               static_cast<std::size_t>(h.n_channels) *
                               static_cast<std::size_t>(h.n_samples);
  std::string payload(n_values * 4, '\0');
  const std::size_t payload_got = read_some(source, payload.data(), payload.size());
  if (payload_got < payload.size()) {
    throw Error(ErrorCode::kPayloadLengthMismatch,
                "expected " + std::to_string(payload.size()) +
                    " payload bytes, found " + std::to_string(payload_got));
  }
  if (source.peek() != std::char_traits<char>::eof()) {
    throw Error(ErrorCode::kPayloadLengthMismatch,
                "trailing bytes after declared payload");
  }
  std::vector<float> samples(n_values);
  const auto* p = reinterpret_cast<const unsigned char*>(payload.data());
  for (std::size_t i = 0; i < n_values; ++i) {
    samples[i] = std::bit_cast<float>(get_u32le(p + 4 * i));
  }
  const int n_classes =
      *std::max_element(h.labels.begin(), h.labels.end());
  return TrialSet(Montage(std::move(h.channel_names), h.fs_hz), h.n_samples,
                  std::move(samples), std::move(h.labels), n_classes);
}

void write_ets_file(const TrialSet& trials, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + tmp.string());
    write_ets(trials, out);
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIoError, "cannot rename to " + path.string());
  }
}

TrialSet read_ets_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_ets(in);
}

TrialSet import_csv(std::istream& source, double fs_hz,
                    std::vector<std::string> channel_names) {
  const int n_channels = static_cast<int>(channel_names.size());
  if (n_channels < 1) {
    throw Error(ErrorCode::kInvalidMontage, "no channel names given");
  }
  std::vector<ClassId> labels;
  std::vector<float> samples;
  std::size_t width = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty() || row.front() == '#') continue;

    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      cells.push_back(trim(row.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (width == 0) {
      width = cells.size();
      if (width < 2 || (width - 1) % n_channels != 0) {
        throw Error(ErrorCode::kRaggedRows,
                    "row " + std::to_string(line_no) + " has " +
                        std::to_string(width - 1) +
                        " values, not a positive multiple of " +
                        std::to_string(n_channels) + " channels");
      }
    } else if (cells.size() != width) {
      throw Error(ErrorCode::kRaggedRows,
                  "row " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " columns, expected " +
                      std::to_string(width));
    }

    ClassId label = 0;
    const auto& lc = cells[0];
    auto [lp, lec] = std::from_chars(lc.data(), lc.data() + lc.size(), label);
    if (lec != std::errc() || lp != lc.data() + lc.size() || label < 1) {
      throw Error(ErrorCode::kBadLabel, "row " + std::to_string(line_no) +
                                            ": label '" + std::string(lc) +
                                            "'");
    }
    labels.push_back(label);
    for (std::size_t col = 1; col < cells.size(); ++col) {
      const auto& cell = cells[col];
      float value = 0.0f;
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || p != cell.data() + cell.size()) {
        throw Error(ErrorCode::kBadNumber,
                    "row " + std::to_string(line_no) + ", column " +
                        std::to_string(col + 1) + ": '" + std::string(cell) +
                        "'");
      }
      samples.push_back(value);
    }
  }
  if (labels.empty()) {
    throw Error(ErrorCode::kInvalidTrialSet, "no data rows");
  }
  const int n_samples = static_cast<int>((width - 1) / n_channels);
  const int n_classes = *std::max_element(labels.begin(), labels.end());
  return TrialSet(Montage(std::move(channel_names), fs_hz), n_samples,
                  std::move(samples), std::move(labels), n_classes);
}

void write_csv(const TrialSet& trials, std::ostream& sink) {
  char buf[64];
  const std::size_t row_len =
      static_cast<std::size_t>(trials.n_channels()) * trials.n_samples();
  for (int n = 0; n < trials.n_trials(); ++n) {
    sink << trials.labels()[n];
    const float* row = trials.samples().data() + n * row_len;
    for (std::size_t i = 0; i < row_len; ++i) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), row[i]);
      sink << ',' << std::string_view(buf, end - buf);
    }
    sink << '\n';
  }
}

void validate(const SynthSpec& spec) {
  const auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kSpecInvalid, msg);
  };
  if (spec.n_trials < 1) fail("n_trials must be >= 1");
  if (spec.n_channels < 1) fail("n_channels must be >= 1");
  if (spec.n_samples < 2) fail("n_samples must be >= 2");
  if (spec.n_classes < 2) fail("n_classes must be >= 2");
  if (spec.n_trials < spec.n_classes) fail("fewer trials than classes");
  if (!(spec.separation >= 0.0) || !std::isfinite(spec.separation)) {
    fail("separation must be a non-negative number");
  }
  if (!(spec.noise_sigma > 0.0) || !std::isfinite(spec.noise_sigma)) {
    fail("noise_sigma must be positive");
  }
  if (!(spec.fs_hz > 0.0)) fail("fs_hz must be positive");
  for (ChannelIndex c : spec.informative_channels) {
    if (c < 0 || c >= spec.n_channels) {
      fail("informative channel " + std::to_string(c) + " out of range");
    }
  }
  if (!spec.channel_names.empty() &&
      static_cast<int>(spec.channel_names.size()) != spec.n_channels) {
    fail("channel_names length != n_channels");
  }
}

TrialSet synth(const SynthSpec& spec, std::uint64_t seed) {
  validate(spec);
  const int n = spec.n_trials;
  const int c = spec.n_channels;
  const int t = spec.n_samples;
  const int k = spec.n_classes;
  std::vector<std::uint8_t> informative(c, 0);
  for (ChannelIndex ch : spec.informative_channels) informative[ch] = 1;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sigma = spec.noise_sigma;
  const double log_var_step = std::sqrt(2.0 / t);

  std::vector<ClassId> labels(n);
  std::vector<float> samples(static_cast<std::size_t>(n) * c * t);
  std::size_t pos = 0;
  for (int trial = 0; trial < n; ++trial) {
    const ClassId y = trial % k + 1;
    labels[trial] = y;
    const double offset_units = spec.separation * (y - (k + 1) / 2.0);
    const double mu = offset_units * sigma;
    const double gain = std::exp(0.5 * offset_units * log_var_step);
    for (int ch = 0; ch < c; ++ch) {
      const bool inf = informative[ch] != 0;
      for (int s = 0; s < t; ++s) {
        const double z = noise(rng);
        samples[pos++] = static_cast<float>(inf ? mu + sigma * gain * z : sigma * z);
      }
    }
  }
  auto names = spec.channel_names.empty() ? default_names(c) : spec.channel_names;
  return TrialSet(Montage(std::move(names), spec.fs_hz), t, std::move(samples),
                  std::move(labels), k);
}

std::string fingerprint(const TrialSet& trials) {
  std::ostringstream buf(std::ios::binary);
  write_ets(trials, buf);
  const std::string bytes = buf.str();

  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex(2 * len, '0');
  for (unsigned int i = 0; i < len; ++i) {
    hex[2 * i] = kHex[digest[i] >> 4];
    hex[2 * i + 1] = kHex[digest[i] & 0xf];
  }
  return hex;
}

}  // namespace chansel
