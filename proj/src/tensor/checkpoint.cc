// Copyright 2026 The SGQ Map Authors
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

#include "sgq/tensor/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <unordered_map>

namespace sgq {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

template <typename U>
void put(std::vector<std::uint8_t>& out, U value) {
  std::uint8_t raw[sizeof(U)];
  std::memcpy(raw, &value, sizeof(U));
  out.insert(out.end(), raw, raw + sizeof(U));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <typename U>
  U get() {
    need(sizeof(U));
    U value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return value;
  }
  std::string get_string(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<std::uint8_t> get_bytes(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> b(bytes_.begin() + static_cast<long>(pos_),
                                bytes_.begin() + static_cast<long>(pos_ + n));
    pos_ += n;
    return b;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw std::runtime_error("checkpoint: truncated file");
    }
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

std::size_t dtype_size(DType d) { return d == DType::kFloat32 ? 4 : 8; }

template <typename T>
constexpr DType dtype_of() {
  return sizeof(T) == 4 ? DType::kFloat32 : DType::kFloat64;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(
    const std::vector<CheckpointEntry>& entries) {
  std::vector<std::uint8_t> out(std::begin(kCheckpointMagic),
                                std::end(kCheckpointMagic));
  out.push_back(kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    const std::size_t expected =
        static_cast<std::size_t>(shape_numel(e.shape)) * dtype_size(e.dtype);
    if (e.payload.size() != expected) {
      throw std::invalid_argument("checkpoint: payload size mismatch for '" +
                                  e.name + "'");
    }
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out.insert(out.end(), e.name.begin(), e.name.end());
    out.push_back(static_cast<std::uint8_t>(e.dtype));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.shape.size()));
    for (std::int64_t extent : e.shape) {
      put<std::uint64_t>(out, static_cast<std::uint64_t>(extent));
    }
  }
  for (const auto& e : entries) {
    out.insert(out.end(), e.payload.begin(), e.payload.end());
  }
  return out;
}

std::vector<CheckpointEntry> decode_checkpoint(
    const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (r.get_string(8) != std::string(kCheckpointMagic, 8)) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  const std::uint8_t version = r.get<std::uint8_t>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " +
                             std::to_string(version));
  }
  const std::uint32_t count = r.get<std::uint32_t>();
  std::vector<CheckpointEntry> entries(count);
  for (auto& e : entries) {
    e.name = r.get_string(r.get<std::uint32_t>());
    const std::uint8_t code = r.get<std::uint8_t>();
    if (code > 1) {
      throw std::runtime_error("checkpoint: unknown dtype code for '" +
                               e.name + "'");
    }
    e.dtype = static_cast<DType>(code);
    const std::uint32_t rank = r.get<std::uint32_t>();
    e.shape.resize(rank);
    for (auto& extent : e.shape) {
      extent = static_cast<std::int64_t>(r.get<std::uint64_t>());
    }
  }
  for (auto& e : entries) {
    e.payload = r.get_bytes(static_cast<std::size_t>(shape_numel(e.shape)) *
                            dtype_size(e.dtype));
  }
  if (!r.done()) throw std::runtime_error("checkpoint: trailing bytes");
  return entries;
}

void write_checkpoint(const std::string& path,
                      const std::vector<CheckpointEntry>& entries) {
  const std::vector<std::uint8_t> bytes = encode_checkpoint(entries);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

std::vector<CheckpointEntry> read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

template <typename T>
std::vector<CheckpointEntry> checkpoint_entries(
    const ParameterStore<T>& store) {
  std::vector<CheckpointEntry> entries;
  for (const auto& [name, tensor] : store.entries()) {
    CheckpointEntry e;
    e.name = name;
    e.dtype = dtype_of<T>();
    e.shape = tensor.shape();
    e.payload.resize(static_cast<std::size_t>(tensor.numel()) * sizeof(T));
    std::memcpy(e.payload.data(), tensor.data().data(), e.payload.size());
    entries.push_back(std::move(e));
  }
  return entries;
}

template <typename T>
void load_checkpoint(ParameterStore<T>& store,
                     const std::vector<CheckpointEntry>& entries) {
  std::unordered_map<std::string, const CheckpointEntry*> by_name;
  for (const auto& e : entries) by_name[e.name] = &e;
  for (auto& [name, tensor] : store.entries()) {
    auto it = by_name.find(name);
    if (it == by_name.end()) {
      throw std::runtime_error("checkpoint: missing parameter '" + name + "'");
    }
    const CheckpointEntry& e = *it->second;
    if (e.shape != tensor.shape()) {
      throw std::runtime_error("checkpoint: shape mismatch for '" + name +
                               "': " + shape_string(e.shape) + " vs " +
                               shape_string(tensor.shape()));
    }
    std::span<T> dst = tensor.mutable_data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      if (e.dtype == DType::kFloat32) {
        float v;
        std::memcpy(&v, e.payload.data() + i * 4, 4);
        dst[i] = static_cast<T>(v);
      } else {
        double v;
        std::memcpy(&v, e.payload.data() + i * 8, 8);
        dst[i] = static_cast<T>(v);
      }
    }
  }
  if (by_name.size() != store.entries().size()) {
    throw std::runtime_error("checkpoint: parameter count mismatch");
  }
}

template std::vector<CheckpointEntry> checkpoint_entries(
    const ParameterStore<float>&);
template std::vector<CheckpointEntry> checkpoint_entries(
    const ParameterStore<double>&);
template void load_checkpoint(ParameterStore<float>&,
                              const std::vector<CheckpointEntry>&);
template void load_checkpoint(ParameterStore<double>&,
                              const std::vector<CheckpointEntry>&);

}  // namespace sgq
