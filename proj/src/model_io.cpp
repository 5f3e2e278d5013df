#include "otbag/model_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace otbag {

namespace {

constexpr const char* kMagic = "otbag-model v1";

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_member(std::ostream& out, char tag, const WeakLearner& member) {
  out << tag << ' ' << learner_kind_name(member.kind()) << ' '
      << format_double(member.bias());
  for (double w : member.weights()) out << ' ' << format_double(w);
  out << '\n';
}

void write_ledger(std::ostream& out, const AccuracyLedger& ledger) {
  out << "ledger_h";
  for (std::uint64_t c : ledger.correct_h) out << ' ' << c;
  out << '\n';
  out << "ledger_f " << ledger.correct_f << '\n';
  out << "ledger_targets " << ledger.targets_seen << '\n';
}

void write_members(std::ostream& out, const DualModel& dual) {
  for (const WeakLearner& m : dual.h_members) write_member(out, 'h', m);
  for (const WeakLearner& m : dual.f_members) write_member(out, 'f', m);
}

struct LineReader {
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next nonempty line split into whitespace tokens.
  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      std::string token;
      while (ss >> token) tokens.push_back(token);
      if (!tokens.empty()) return tokens;
    }
    raise("BadModelFile", "unexpected end of model file");
  }

  std::vector<std::string> expect(const std::string& key, std::size_t values) {
    auto tokens = next();
    if (tokens[0] != key)
      raise("BadModelFile", "expected '" + key + "', got '" + tokens[0] + "'");
    if (values != std::size_t(-1) && tokens.size() != values + 1)
      raise("BadModelFile", "wrong token count on '" + key + "' line");
    return tokens;
  }

  std::istream& in_;
};

double parse_double(const std::string& s) {
  double v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    raise("BadModelFile", "bad float '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    raise("BadModelFile", "bad integer '" + s + "'");
  return v;
}

WeakLearner read_member(LineReader& reader, char tag, std::size_t dimension,
                        double learning_rate) {
  auto tokens = reader.next();
  if (tokens[0] != std::string(1, tag))
    raise("BadModelFile", "expected member line '" + std::string(1, tag) + "'");
  if (tokens.size() != dimension + 3)
    raise("BadModelFile", "member line has wrong weight count");
  LearnerConfig config{learner_kind_from_name(tokens[1]), learning_rate};
  double bias = parse_double(tokens[2]);
  std::vector<double> weights(dimension);
  for (std::size_t i = 0; i < dimension; ++i) weights[i] = parse_double(tokens[3 + i]);
  return WeakLearner::from_state(config, std::move(weights), bias);
}

std::vector<WeakLearner> read_members(LineReader& reader, char tag,
                                      std::size_t count, std::size_t dimension,
                                      double learning_rate) {
  std::vector<WeakLearner> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(read_member(reader, tag, dimension, learning_rate));
  return out;
}

AccuracyLedger read_ledger(LineReader& reader, std::size_t members) {
  AccuracyLedger ledger;
  auto h = reader.expect("ledger_h", members);
  for (std::size_t m = 0; m < members; ++m)
    ledger.correct_h.push_back(parse_u64(h[1 + m]));
  ledger.correct_f = parse_u64(reader.expect("ledger_f", 1)[1]);
  ledger.targets_seen = parse_u64(reader.expect("ledger_targets", 1)[1]);
  return ledger;
}

std::vector<std::size_t> parse_index_list(const std::vector<std::string>& tokens,
                                          std::size_t members) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    std::size_t idx = static_cast<std::size_t>(parse_u64(tokens[i]));
    if (idx >= members) raise("BadModelFile", "member index out of range");
    out.push_back(idx);
  }
  return out;
}

}  // namespace

std::string algorithm_tag(const AnyModel& model) {
  if (std::holds_alternative<OTBagModel>(model)) return "otbag";
  if (std::holds_alternative<SDMVModel>(model)) return "sdmv";
  return "jdsmv";
}

void save_model(const AnyModel& model, std::ostream& out) {
  const auto header = [&out](const std::string& algorithm, std::size_t members,
                             std::size_t dimension, double lr) {
    out << kMagic << '\n'
        << "algorithm " << algorithm << '\n'
        << "members " << members << '\n'
        << "dimension " << dimension << '\n'
        << "learning_rate " << format_double(lr) << '\n';
  };

  if (const auto* otbag = std::get_if<OTBagModel>(&model)) {
    if (otbag->members.empty()) raise("BadModel", "ensemble has no members");
    const auto& first = otbag->members.front();
    header("otbag", otbag->members.size(), first.dimension(),
           first.learning_rate());
    for (const WeakLearner& m : otbag->members) write_member(out, 'h', m);
    return;
  }

  if (const auto* sdmv = std::get_if<SDMVModel>(&model)) {
    if (sdmv->dual.h_members.empty()) raise("BadModel", "ensemble has no members");
    const auto& first = sdmv->dual.h_members.front();
    header("sdmv", sdmv->dual.h_members.size(), first.dimension(),
           first.learning_rate());
    out << "surviving";
    for (std::size_t m : sdmv->surviving) out << ' ' << m;
    out << '\n';
    out << "fallback_to_f " << (sdmv->fallback_to_f ? 1 : 0) << '\n';
    write_ledger(out, sdmv->dual.ledger);
    write_members(out, sdmv->dual);
    return;
  }

  const auto& jdsmv = std::get<JDSMVModel>(model);
  if (jdsmv.dual.h_members.empty()) raise("BadModel", "ensemble has no members");
  const auto& first = jdsmv.dual.h_members.front();
  header("jdsmv", jdsmv.dual.h_members.size(), first.dimension(),
         first.learning_rate());
  out << "alpha " << jdsmv.segments.alpha << '\n';
  out << "eta " << jdsmv.segments.eta << '\n';
  for (const auto& set : jdsmv.segments.sets) {
    out << "set";
    for (std::size_t m : set) out << ' ' << m;
    out << '\n';
  }
  out << "target_counts";
  for (std::uint64_t c : jdsmv.segments.target_counts) out << ' ' << c;
  out << '\n';
  write_ledger(out, jdsmv.dual.ledger);
  write_members(out, jdsmv.dual);
}

void save_model(const AnyModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) raise("IoError", "cannot open '" + path.string() + "' for writing");
  save_model(model, out);
  out.flush();
  if (!out) raise("IoError", "failed writing '" + path.string() + "'");
}

AnyModel load_model(std::istream& in) {
  LineReader reader(in);

  {
    std::string line;
    while (std::getline(in, line) && line.empty()) {
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMagic) raise("BadModelFile", "missing model magic line");
  }

  const std::string algorithm = reader.expect("algorithm", 1)[1];
  const std::size_t members =
      static_cast<std::size_t>(parse_u64(reader.expect("members", 1)[1]));
  const std::size_t dimension =
      static_cast<std::size_t>(parse_u64(reader.expect("dimension", 1)[1]));
  const double learning_rate = parse_double(reader.expect("learning_rate", 1)[1]);
  if (members == 0) raise("BadModelFile", "members must be >= 1");
  if (dimension == 0) raise("BadModelFile", "dimension must be >= 1");

  if (algorithm == "otbag") {
    OTBagModel model;
    model.members = read_members(reader, 'h', members, dimension, learning_rate);
    return model;
  }

  if (algorithm == "sdmv") {
    SDMVModel model;
    model.surviving = parse_index_list(reader.expect("surviving", std::size_t(-1)),
                                       members);
    model.fallback_to_f = parse_u64(reader.expect("fallback_to_f", 1)[1]) != 0;
    if (model.fallback_to_f == !model.surviving.empty())
      raise("BadModelFile", "surviving set and fallback flag disagree");
    model.dual.ledger = read_ledger(reader, members);
    model.dual.h_members =
        read_members(reader, 'h', members, dimension, learning_rate);
    model.dual.f_members =
        read_members(reader, 'f', members, dimension, learning_rate);
    return model;
  }

  if (algorithm == "jdsmv") {
    JDSMVModel model;
    model.segments.alpha =
        static_cast<std::size_t>(parse_u64(reader.expect("alpha", 1)[1]));
    model.segments.eta =
        static_cast<std::size_t>(parse_u64(reader.expect("eta", 1)[1]));
    if (model.segments.alpha < 2) raise("BadModelFile", "alpha must be >= 2");
    for (std::size_t i = 0; i + 1 < model.segments.alpha; ++i) {
      model.segments.sets.push_back(
          parse_index_list(reader.expect("set", std::size_t(-1)), members));
    }
    auto counts = reader.expect("target_counts", model.segments.alpha);
    for (std::size_t i = 0; i < model.segments.alpha; ++i)
      model.segments.target_counts.push_back(parse_u64(counts[1 + i]));
    model.dual.ledger = read_ledger(reader, members);
    model.dual.h_members =
        read_members(reader, 'h', members, dimension, learning_rate);
    model.dual.f_members =
        read_members(reader, 'f', members, dimension, learning_rate);
    return model;
  }

  raise("BadModelFile", "unknown algorithm '" + algorithm + "'");
}

AnyModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise("IoError", "cannot open '" + path.string() + "'");
  return load_model(in);
}

}  // namespace otbag
