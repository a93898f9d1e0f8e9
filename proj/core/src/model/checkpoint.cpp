#include "medner/model/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "medner/error.hpp"
#include "medner/util/atomic_file.hpp"

namespace medner {

namespace {

constexpr std::string_view kMagic = "MEDNER-CKPT";

template <class T>
void append_le(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(bytes, sizeof(T));
}

template <class T>
T read_le(const char* p) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

struct Header {
  nlohmann::json manifest;
  std::size_t payload_offset = 0;
};

Header split_header(std::string_view bytes) {
  const auto nl1 = bytes.find('\n');
  if (nl1 == std::string_view::npos || bytes.substr(0, nl1) != kMagic) throw FormatError("not a medner checkpoint");
  const auto nl2 = bytes.find('\n', nl1 + 1);
  if (nl2 == std::string_view::npos) throw FormatError("truncated checkpoint manifest");
  Header h;
  try {
    h.manifest = nlohmann::json::parse(bytes.substr(nl1 + 1, nl2 - nl1 - 1));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid checkpoint manifest: ") + e.what());
  }
  h.payload_offset = nl2 + 1;
  const int version = h.manifest.value("format_version", -1);
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint format version " + std::to_string(version));
  }
  return h;
}

}  // namespace

std::string_view precision_tag(Precision p) { return p == Precision::f32 ? "f32" : "f64"; }

Precision parse_precision(std::string_view tag) {
  if (tag == "f32" || tag == "32") return Precision::f32;
  if (tag == "f64" || tag == "64") return Precision::f64;
  throw FormatError("unknown precision '" + std::string(tag) + "'");
}

template <class T>
std::string encode_checkpoint(const Parameters<T>& params, const CheckpointMeta& meta) {
  nlohmann::json tensors = nlohmann::json::array();
  std::size_t offset = 0;
  for (const auto& [name, t] : params.entries()) {
    const std::size_t length = t.size() * sizeof(T);
    tensors.push_back({{"name", name}, {"shape", t.shape}, {"offset", offset}, {"length", length}});
    offset += length;
  }
  const nlohmann::json manifest = {
      {"format_version", kCheckpointVersion},
      {"config", meta.config},
      {"seed", meta.seed},
      {"precision", precision_tag(precision_of<T>())},
      {"labels", meta.labels},
      {"vocab", meta.vocab},
      {"tensors", tensors},
      {"payload_bytes", offset},
  };
  std::string out;
  out.reserve(offset + 4096);
  out += kMagic;
  out += '\n';
  out += manifest.dump();
  out += '\n';
  for (const auto& entry : params.entries()) {
    for (T v : entry.second.values) append_le(out, v);
  }
  return out;
}

Precision checkpoint_precision(std::string_view bytes) {
  return parse_precision(split_header(bytes).manifest.at("precision").get<std::string>());
}

template <class T>
Checkpoint<T> decode_checkpoint(std::string_view bytes) {
  const Header h = split_header(bytes);
  const auto& m = h.manifest;
  Checkpoint<T> ck;
  try {
    if (parse_precision(m.at("precision").get<std::string>()) != precision_of<T>()) {
      throw FormatError("checkpoint precision is " + m.at("precision").get<std::string>() + ", expected " +
                        std::string(precision_tag(precision_of<T>())));
    }
    ck.meta.config = m.at("config").get<ModelConfig>();
    ck.meta.seed = m.at("seed").get<std::uint64_t>();
    ck.meta.labels = m.at("labels").get<std::vector<std::string>>();
    ck.meta.vocab = m.at("vocab").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid checkpoint manifest: ") + e.what());
  }
  try {
    ck.meta.config.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid checkpoint config: ") + e.what());
  }
  if (ck.meta.labels.size() != ck.meta.config.n_labels || ck.meta.vocab.size() != ck.meta.config.vocab_size) {
    throw FormatError("checkpoint label or vocabulary list disagrees with its config");
  }

  const auto expected = parameter_manifest(ck.meta.config);
  const auto& tensors = m.at("tensors");
  if (tensors.size() != expected.size()) {
    throw FormatError("checkpoint lists " + std::to_string(tensors.size()) + " tensors, config implies " +
                      std::to_string(expected.size()));
  }
  const std::size_t payload_bytes = m.at("payload_bytes").get<std::size_t>();
  const std::size_t available = bytes.size() - h.payload_offset;
  if (available < payload_bytes) throw FormatError("truncated payload");
  if (available > payload_bytes) throw FormatError("trailing bytes after checkpoint payload");

  const char* payload = bytes.data() + h.payload_offset;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& entry = tensors[i];
    const auto name = entry.at("name").get<std::string>();
    const auto shape = entry.at("shape").get<Shape>();
    if (name != expected[i].name) {
      throw FormatError("tensor '" + name + "' found where '" + expected[i].name + "' was expected");
    }
    if (shape != expected[i].shape) {
      throw FormatError("tensor '" + name + "' has shape " + shape_str(shape) + " but the config implies " +
                        shape_str(expected[i].shape));
    }
    const auto offset = entry.at("offset").get<std::size_t>();
    const auto length = entry.at("length").get<std::size_t>();
    if (length != shape_volume(shape) * sizeof(T)) throw FormatError("tensor '" + name + "' has a bad byte length");
    if (offset > payload_bytes || length > payload_bytes - offset) {
      throw FormatError("tensor '" + name + "' lies outside the payload");
    }
    Tensor<T> t(shape);
    for (std::size_t k = 0; k < t.size(); ++k) t.values[k] = read_le<T>(payload + offset + k * sizeof(T));
    ck.params.add(name, std::move(t));
  }
  return ck;
}

template <class T>
void save_checkpoint(const std::filesystem::path& path, const Parameters<T>& params, const CheckpointMeta& meta) {
  write_file_atomic(path, encode_checkpoint(params, meta));
}

template <class T>
Checkpoint<T> load_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = read_text_file(path);
  try {
    return decode_checkpoint<T>(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

template std::string encode_checkpoint<float>(const Parameters<float>&, const CheckpointMeta&);
template std::string encode_checkpoint<double>(const Parameters<double>&, const CheckpointMeta&);
template Checkpoint<float> decode_checkpoint<float>(std::string_view);
template Checkpoint<double> decode_checkpoint<double>(std::string_view);
template void save_checkpoint<float>(const std::filesystem::path&, const Parameters<float>&, const CheckpointMeta&);
template void save_checkpoint<double>(const std::filesystem::path&, const Parameters<double>&,
                                      const CheckpointMeta&);
template Checkpoint<float> load_checkpoint<float>(const std::filesystem::path&);
template Checkpoint<double> load_checkpoint<double>(const std::filesystem::path&);

}  // namespace medner
