#include "spanlink/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "spanlink/error.hpp"

namespace spanlink {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError("invalid value '" + std::string(value) + "' for key '" + std::string(key) + "'");
  }
  return out;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

RunConfig profile_defaults(std::string_view profile) {
  RunConfig c;
  c.profile = std::string(profile);
  if (profile == "toy") {
    // Single-word entity annotation, as in the starred benchmark variants.
    c.schema_mode = SchemaMode::kLastWord;
    c.match_mode = MatchMode::kLastWord;
    return c;
  }

  // Pretrained-encoder profiles: BERT-base width, d_e = 900, lr 1e-5,
  // n_neg = 100, per-dataset batch size and C (train / valid / test).
  c.encoder = EncoderKind::kPretrainedAdapter;
  c.d = 768;
  c.d_e = 900;
  c.lr = 1e-5;
  c.n_neg = 100;
  c.vocab_size = 28996;
  c.schema_mode = SchemaMode::kExactSpan;
  c.match_mode = MatchMode::kExactSpan;
  if (profile == "nyt-star") {
    c.batch_size = 8;
    c.c_train = 9, c.c_valid = 7, c.c_infer = 7;
    c.schema_mode = SchemaMode::kLastWord;
    c.match_mode = MatchMode::kLastWord;
  } else if (profile == "webnlg-star") {
    c.batch_size = 6;
    c.c_train = 6, c.c_valid = 6, c.c_infer = 6;
    c.schema_mode = SchemaMode::kLastWord;
    c.match_mode = MatchMode::kLastWord;
  } else if (profile == "nyt") {
    c.batch_size = 8;
    c.c_train = 12, c.c_valid = 12, c.c_infer = 11;
  } else if (profile == "webnlg") {
    c.batch_size = 6;
    c.c_train = 21, c.c_valid = 21, c.c_infer = 20;
  } else {
    throw ConfigError("unknown profile '" + std::string(profile) + "' (toy, nyt-star, webnlg-star, nyt, webnlg)");
  }
  return c;
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "profile") {
    *this = profile_defaults(value);
  } else if (key == "train") {
    train = value;
  } else if (key == "valid") {
    valid = value;
  } else if (key == "test") {
    test = value;
  } else if (key == "output_dir") {
    output_dir = value;
  } else if (key == "vocab_file") {
    vocab_file = value;
  } else if (key == "encoder") {
    encoder = parse_encoder_kind(value);
  } else if (key == "d") {
    d = parse_number<int>(key, value);
  } else if (key == "vocab_size") {
    vocab_size = parse_number<int>(key, value);
  } else if (key == "max_length") {
    max_length = parse_number<int>(key, value);
  } else if (key == "layers") {
    layers = parse_number<int>(key, value);
  } else if (key == "radius") {
    radius = parse_number<int>(key, value);
  } else if (key == "d_e") {
    d_e = parse_number<int>(key, value);
  } else if (key == "link_init") {
    if (value == "uniform") {
      link_init = LinkInit::kUniform;
    } else if (value == "zero") {
      link_init = LinkInit::kZero;
    } else {
      throw ConfigError("link_init must be uniform or zero");
    }
  } else if (key == "c_train") {
    c_train = parse_number<int>(key, value);
  } else if (key == "c_valid") {
    c_valid = parse_number<int>(key, value);
  } else if (key == "c_infer") {
    c_infer = parse_number<int>(key, value);
  } else if (key == "n_neg") {
    n_neg = parse_number<int>(key, value);
  } else if (key == "theta") {
    theta = parse_number<double>(key, value);
  } else if (key == "lr") {
    lr = parse_number<double>(key, value);
  } else if (key == "batch_size") {
    batch_size = parse_number<int>(key, value);
  } else if (key == "epochs") {
    epochs = parse_number<int>(key, value);
  } else if (key == "patience") {
    patience = parse_number<int>(key, value);
  } else if (key == "eval_every") {
    eval_every = parse_number<int>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "match_mode") {
    match_mode = parse_match_mode(value);
  } else if (key == "schema_mode") {
    schema_mode = parse_schema_mode(value);
  } else if (key == "device") {
    device = value;
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  encoder_config().validate();
  if (d_e <= 0) throw ConfigError("d_e must be positive");
  if (c_train < 1 || c_valid < 1 || c_infer < 1) throw ConfigError("candidate lengths must be at least 1");
  if (n_neg < 0) throw ConfigError("n_neg must be non-negative");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (patience < 0 || eval_every < 1) throw ConfigError("patience must be >= 0 and eval_every >= 1");
  if (device != "cpu") throw ConfigError("device '" + device + "' is not available (only cpu)");
}

EncoderConfig RunConfig::encoder_config() const {
  EncoderConfig e;
  e.kind = encoder;
  e.width = d;
  e.vocab_size = vocab_size;
  e.max_length = max_length;
  e.layers = layers;
  e.radius = radius;
  return e;
}

std::map<std::string, std::string> RunConfig::to_map() const {
  return {{"profile", profile},
          {"train", train},
          {"valid", valid},
          {"test", test},
          {"output_dir", output_dir},
          {"vocab_file", vocab_file},
          {"encoder", std::string(to_string(encoder))},
          {"d", std::to_string(d)},
          {"vocab_size", std::to_string(vocab_size)},
          {"max_length", std::to_string(max_length)},
          {"layers", std::to_string(layers)},
          {"radius", std::to_string(radius)},
          {"d_e", std::to_string(d_e)},
          {"link_init", link_init == LinkInit::kZero ? "zero" : "uniform"},
          {"c_train", std::to_string(c_train)},
          {"c_valid", std::to_string(c_valid)},
          {"c_infer", std::to_string(c_infer)},
          {"n_neg", std::to_string(n_neg)},
          {"theta", format_double(theta)},
          {"lr", format_double(lr)},
          {"batch_size", std::to_string(batch_size)},
          {"epochs", std::to_string(epochs)},
          {"patience", std::to_string(patience)},
          {"eval_every", std::to_string(eval_every)},
          {"seed", std::to_string(seed)},
          {"match_mode", std::string(to_string(match_mode))},
          {"schema_mode", std::string(to_string(schema_mode))},
          {"device", device}};
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      base.set(trim(std::string_view(line).substr(0, eq)), std::string_view(line).substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

void save_config_file(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file " + path.string());
  // Profile first so reloading does not reset the keys after it.
  auto map = config.to_map();
  out << "profile = " << map.at("profile") << '\n';
  for (const auto& [k, v] : map) {
    if (k != "profile") out << k << " = " << v << '\n';
  }
}

}  // namespace spanlink
