#include "reqexec/repl.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "reqexec/checkpoint.hpp"

namespace reqexec {

std::vector<Value> parse_arguments(std::string_view text) {
  std::vector<Value> out;
  std::size_t i = 0;
  while (true) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    if (text[i] == '"') {
      std::string s;
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\' && i + 1 < text.size()) {
          ++i;
          char c = text[i];
          s += c == 'n' ? '\n' : c == 't' ? '\t' : c;
        } else {
          s += text[i];
        }
        ++i;
      }
      if (i >= text.size()) throw std::invalid_argument("unterminated string argument");
      ++i;
      out.push_back(Value::string(std::move(s)));
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::string_view tok = text.substr(start, i - start);
    if (tok == "true" || tok == "false") {
      out.push_back(Value::boolean(tok == "true"));
    } else if (tok == "null") {
      out.push_back(Value::undefined());
    } else if (tok[0] == '#') {
      std::uint64_t id = 0;
      auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), id);
      if (ec != std::errc() || p != tok.data() + tok.size() || id == 0)
        throw std::invalid_argument("bad object reference '" + std::string(tok) + "'");
      out.push_back(Value::ref(ObjectId{id}));
    } else {
      std::int64_t n = 0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
      if (ec == std::errc() && p == tok.data() + tok.size()) {
        out.push_back(Value::integer(n));
        continue;
      }
      std::string s(tok);
      char* end = nullptr;
      double d = std::strtod(s.c_str(), &end);
      if (end != s.c_str() + s.size())
        throw std::invalid_argument("cannot read argument '" + s + "'");
      out.push_back(Value::real(d));
    }
  }
  return out;
}

std::string render_state(const ObjectStore& store) {
  std::ostringstream os;
  const Schema& schema = store.schema();
  for (const auto& cls : schema.class_names()) {
    auto it = store.instance_lists().find(cls);
    std::size_t n = it == store.instance_lists().end() ? 0 : it->second.size();
    os << cls << " (" << n << ")\n";
    if (n == 0) continue;
    const ClassInfo& info = schema.at(cls);
    for (ObjectId id : it->second) {
      const ObjectRecord& rec = store.at(id);
      os << "  " << to_string(id);
      for (const auto& a : info.attributes) os << " " << a.name << "=" << to_string(rec.attributes.at(a.name));
      os << "\n";
      for (const auto& r : info.roles) {
        const LinkSlot& slot = rec.links.at(r.roleName);
        if (const auto* one = std::get_if<OneLink>(&slot)) {
          if (one->target) os << "    " << r.roleName << " -> " << to_string(*one->target) << "\n";
        } else if (!std::get<ManyLink>(slot).targets.empty()) {
          os << "    " << r.roleName << " -> " << to_string(Value::refs(std::get<ManyLink>(slot).targets))
             << "\n";
        }
      }
    }
  }
  return os.str();
}

std::string render_invariants(const InvariantReport& report) {
  std::ostringstream os;
  for (const auto& r : report.results) {
    if (r.holds) continue;
    os << "invariant " << r.name << " violated";
    if (!r.witnesses.empty()) {
      os << " by";
      for (std::size_t i = 0; i < r.witnesses.size(); ++i)
        os << (i ? ", " : " ") << to_string(r.witnesses[i]);
    }
    if (r.fault) os << " (fault: " << *r.fault << ")";
    os << "\n";
  }
  std::string s = os.str();
  return s.empty() ? "invariants: all hold\n" : s;
}

std::vector<std::string> Repl::commands_of(const std::string& transcript) {
  std::vector<std::string> out;
  std::istringstream in(transcript);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("> ", 0) == 0) out.push_back(line.substr(2));
  }
  return out;
}

Session& Repl::session_for(const std::string& useCase) {
  auto it = sessions_.find(useCase);
  if (it == sessions_.end()) it = sessions_.emplace(useCase, executor_.open_session(useCase)).first;
  return it->second;
}

void Repl::cmd_list() {
  for (const auto& op : executor_.operations()) {
    const auto& sig = op.signature();
    out_ << op.useCase() << "::" << sig.name << "(";
    for (std::size_t i = 0; i < sig.params.size(); ++i)
      out_ << (i ? ", " : "") << sig.params[i].name << " : " << to_string(sig.params[i].type);
    out_ << ")";
    if (sig.returnType) out_ << " : " << to_string(*sig.returnType);
    if (!op.executable()) {
      out_ << "  [hooks:";
      for (const auto& h : op.hooks) out_ << " " << h.name;
      out_ << "]";
    }
    out_ << "\n";
  }
}

void Repl::cmd_invoke(const std::string& rest) {
  std::size_t sp = rest.find_first_of(" \t");
  std::string target = rest.substr(0, sp);
  std::size_t sep = target.find("::");
  if (sep == std::string::npos) {
    out_ << "error: expected UseCase::operation\n";
    ++errors_;
    return;
  }
  try {
    std::vector<Value> args =
        parse_arguments(sp == std::string::npos ? std::string_view{} : std::string_view(rest).substr(sp));
    Session& s = session_for(target.substr(0, sep));
    Outcome o = executor_.invoke(s, target.substr(sep + 2), args);
    out_ << to_string(o) << "\n";
    if (const auto* ok = std::get_if<outcome::Ok>(&o)) out_ << render_invariants(ok->report);
  } catch (const std::exception& e) {
    out_ << "error: " << e.what() << "\n";
    ++errors_;
  }
}

void Repl::cmd_save(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    out_ << "error: cannot write " << path << "\n";
    ++errors_;
    return;
  }
  f << save_checkpoint(executor_.store());
  out_ << "saved " << executor_.store().records().size() << " object(s)\n";
}

void Repl::cmd_load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    out_ << "error: cannot read " << path << "\n";
    ++errors_;
    return;
  }
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    load_checkpoint(executor_.store(), ss.str());
    sessions_.clear();
    out_ << "loaded " << executor_.store().records().size() << " object(s)\n";
  } catch (const CheckpointError& e) {
    out_ << "error: " << e.what() << "\n";
    ++errors_;
  }
}

bool Repl::execute_line(const std::string& raw) {
  std::string line = raw;
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  std::size_t b = line.find_first_not_of(" \t");
  if (b == std::string::npos || line[b] == '#') {
    out_ << line << "\n";
    return true;
  }
  line = line.substr(b);
  out_ << "> " << line << "\n";
  std::size_t sp = line.find(' ');
  std::string cmd = line.substr(0, sp);
  std::string rest = sp == std::string::npos ? "" : line.substr(line.find_first_not_of(' ', sp));
  if (cmd == "quit" || cmd == "exit") return false;
  if (cmd == "list") {
    cmd_list();
  } else if (cmd == "invoke") {
    cmd_invoke(rest);
  } else if (cmd == "state") {
    out_ << render_state(executor_.store());
  } else if (cmd == "invariants") {
    out_ << render_invariants(executor_.check_invariants());
  } else if (cmd == "save" && !rest.empty()) {
    cmd_save(rest);
  } else if (cmd == "load" && !rest.empty()) {
    cmd_load(rest);
  } else if (cmd == "help") {
    out_ << "commands: list | invoke UseCase::op args... | state | invariants | save FILE | "
            "load FILE | quit\n";
  } else {
    out_ << "error: unknown command '" << line << "'\n";
    ++errors_;
  }
  return true;
}

int Repl::run(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!execute_line(line)) break;
  }
  return errors_;
}

}  // namespace reqexec
