#include "support.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "reqexec/checkpoint.hpp"
#include "reqexec/fixtures.hpp"
#include "reqexec/repl.hpp"

namespace reqexec::testing {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string source_dir() { return REQEXEC_SOURCE_DIR; }

std::string golden_path(const std::string& name) { return source_dir() + "/tests/golden/" + name; }

namespace {

LoadedModel unwrap(BuildResult r, const std::string& what) {
  if (!r.ok()) {
    std::string msg = what + " does not build:";
    for (const auto& d : r.diagnostics) msg += "\n  " + to_string(d);
    throw std::runtime_error(msg);
  }
  return std::move(*r.model);
}

std::string key(const CompiledOperation& op) { return op.useCase() + "::" + op.signature().name; }

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

}  // namespace

LoadedModel build_fixture(const std::string& name, bool includeCrud) {
  return unwrap(build_model_files({fixture_path(name)}, {includeCrud}), "fixture " + name);
}

LoadedModel build_source(const std::string& text, bool includeCrud) {
  return unwrap(build_model({{"<test>", text}}, {includeCrud}), "test model");
}

const CompiledOperation& find_op(const LoadedModel& m, const std::string& useCase,
                                 const std::string& op) {
  for (const auto& o : m.operations) {
    if (o.useCase() == useCase && o.signature().name == op) return o;
  }
  throw std::runtime_error("no operation " + useCase + "::" + op);
}

Value pooled_value(PrimType t, std::mt19937_64& rng) {
  static const std::vector<std::string> strings = {"k1", "k2", "k3"};
  static const std::vector<std::int64_t> ints = {-1, 0, 1, 2, 3, 14, 600, 750};
  static const std::vector<double> reals = {-1.0, 0.0, 0.5, 1.0, 2.5, 10.0, 40.0, 500.0, 1800.0};
  switch (t) {
    case PrimType::Integer: return Value::integer(pick(ints, rng));
    case PrimType::Real:
      return chance(rng, 0.2) ? Value::integer(pick(ints, rng)) : Value::real(pick(reals, rng));
    case PrimType::Boolean: return Value::boolean(chance(rng, 0.5));
    case PrimType::String: return Value::string(pick(strings, rng));
  }
  return Value::undefined();
}

std::vector<Value> random_args(const CompiledOperation& op, std::mt19937_64& rng) {
  std::vector<Value> args;
  for (const auto& p : op.signature().params) args.push_back(pooled_value(p.type, rng));
  return args;
}

ObjectStore seeded_store(std::shared_ptr<const Schema> schema, std::mt19937_64& rng) {
  ObjectStore store(schema);
  std::vector<ObjectId> ids;
  for (const auto& cls : schema->class_names()) {
    int n = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < n; ++i) {
      ObjectId id = store.create_object(cls).as_ref();
      for (const auto& a : schema->at(cls).attributes) {
        store.set_attribute(id, a.name, coerce(pooled_value(a.type, rng), a.type));
      }
      store.add_object(cls, id);
      ids.push_back(id);
    }
  }
  for (ObjectId src : ids) {
    for (const auto& role : schema->at(store.at(src).className).roles) {
      std::vector<ObjectId> targets;
      for (ObjectId t : ids) {
        if (schema->conforms_to(store.at(t).className, role.target)) targets.push_back(t);
      }
      if (targets.empty() || chance(rng, 0.4)) continue;
      if (role.multiplicity == Multiplicity::One) {
        store.add_link_one_to_one(src, role.roleName, pick(targets, rng));
      } else {
        for (ObjectId t : targets) {
          if (chance(rng, 0.5)) store.add_link_one_to_many(src, role.roleName, t);
        }
      }
    }
  }
  return store;
}

void register_stub_hooks(Executor& ex) {
  for (const auto& op : ex.operations()) {
    for (const auto& h : op.hooks) {
      std::optional<SemanticType> rt = h.returnType;
      ex.hooks().register_hook(h.name, [rt](const std::vector<Value>&, ObjectStore&) {
        if (!rt) return Value::boolean(true);
        switch (rt->kind) {
          case SemanticType::Kind::RefSet: return Value::refs({});
          case SemanticType::Kind::Ref: return Value::undefined();
          case SemanticType::Kind::Prim:
            switch (rt->prim) {
              case PrimType::Integer: return Value::integer(0);
              case PrimType::Real: return Value::real(0);
              case PrimType::Boolean: return Value::boolean(true);
              case PrimType::String: return Value::string("");
            }
            break;
          default: break;
        }
        return Value::boolean(true);
      });
    }
  }
}

OracleStats run_postcondition_oracle(const LoadedModel& model, int target, std::uint64_t seed,
                                     long maxInvocations) {
  OracleStats stats;
  std::vector<const CompiledOperation*> ops;
  for (const auto& op : model.operations) {
    if (op.executable()) {
      ops.push_back(&op);
      stats.perOperation[key(op)];
    }
  }
  if (ops.empty()) {
    stats.complete = true;
    return stats;
  }
  Executor ex(model.resolved, model.operations);
  std::mt19937_64 rng(seed);
  std::map<std::string, Session> sessions;
  int below = static_cast<int>(ops.size());
  for (long i = 0; i < maxInvocations && below > 0; ++i) {
    if (i % 80 == 0) {
      ex.store() = chance(rng, 0.5) ? seeded_store(model.resolved->schema_ptr(), rng)
                                    : ObjectStore(model.resolved->schema_ptr());
      sessions.clear();
    }
    const CompiledOperation& op = *pick(ops, rng);
    auto it = sessions.find(op.useCase());
    if (it == sessions.end()) it = sessions.emplace(op.useCase(), ex.open_session(op.useCase())).first;
    std::vector<Value> args = random_args(op, rng);
    InvocationTrace trace;
    OracleOpStats& s = stats.perOperation[key(op)];
    ++s.attempts;
    ++stats.invocations;
    Outcome o = ex.invoke(it->second, op.signature().name, args, &trace);
    if (!std::holds_alternative<outcome::Ok>(o)) continue;
    if (++s.ok == target) --below;
    if (verify_postcondition(op, *trace.preStore, ex.store(), trace, ex.tolerance())) {
      ++s.verified;
    } else if (s.failures.size() < 5) {
      std::string a;
      for (const auto& v : args) a += (a.empty() ? "" : ", ") + to_string(v);
      s.failures.push_back(key(op) + "(" + a + ")");
    }
  }
  stats.complete = below == 0;
  return stats;
}

namespace {

std::vector<CompiledOperation> with_suffix(const std::vector<CompiledOperation>& ops,
                                           const Instruction& suffix) {
  std::vector<CompiledOperation> out = ops;
  for (auto& op : out) op.postPlan.push_back(suffix);
  return out;
}

}  // namespace

std::vector<AtomicityCase> run_atomicity(const LoadedModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto schema = model.resolved->schema_ptr();

  Executor world(model.resolved, model.operations);
  register_stub_hooks(world);

  auto division = make_expr(ast::Arith{ast::ArithOp::Div, make_expr(ast::IntLit{1}),
                                       make_expr(ast::IntLit{0})});
  Executor divEx(model.resolved,
                 with_suffix(model.operations, Instruction{instr::EvalToTemp{"$fault", division}}));
  register_stub_hooks(divEx);
  Executor hookEx(model.resolved,
                  with_suffix(model.operations,
                              Instruction{instr::CallHook{"unbound_probe", {}, std::nullopt}}));

  std::map<std::string, Session> sessions;
  auto session = [&](const std::string& uc) -> Session& {
    auto it = sessions.find(uc);
    if (it == sessions.end()) it = sessions.emplace(uc, world.open_session(uc)).first;
    return it->second;
  };
  auto fresh = [&] {
    world.store() = chance(rng, 0.5) ? seeded_store(schema, rng) : ObjectStore(schema);
    sessions.clear();
  };
  // Half of the steps stay within the target's use case so that session
  // bindings its guard depends on get established.
  auto step = [&](const std::string& useCase) {
    std::vector<const CompiledOperation*> local;
    for (const auto& o : model.operations) {
      if (o.useCase() == useCase) local.push_back(&o);
    }
    const CompiledOperation& op = chance(rng, 0.5) ? *pick(local, rng) : pick(model.operations, rng);
    world.invoke(session(op.useCase()), op.signature().name, random_args(op, rng));
  };

  std::vector<AtomicityCase> out;
  constexpr int kTries = 4000;
  constexpr int kReset = 60;
  for (const auto& op : model.operations) {
    const std::string name = op.signature().name;

    AtomicityCase guard{key(op), "guard"};
    fresh();
    for (int t = 0; t < kTries && !guard.attempted; ++t) {
      if (t % kReset == 0) fresh();
      step(op.useCase());
      Session& s = session(op.useCase());
      const std::string before = save_checkpoint(world.store());
      const auto bindings = s.bindings;
      Outcome o = world.invoke(s, name, random_args(op, rng));
      if (std::holds_alternative<outcome::PreconditionViolated>(o)) {
        guard.attempted = true;
        guard.identical = save_checkpoint(world.store()) == before && s.bindings == bindings;
      }
    }
    if (!guard.attempted) guard.note = "guard never false in " + std::to_string(kTries) + " attempts";
    out.push_back(guard);

    for (const char* kind : {"division", "hook"}) {
      AtomicityCase c{key(op), kind};
      Executor& fx = std::string(kind) == "division" ? divEx : hookEx;
      fresh();
      for (int t = 0; t < kTries && !c.attempted; ++t) {
        if (t % kReset == 0) fresh();
        step(op.useCase());
        fx.store() = world.store();
        Session s = session(op.useCase());
        const std::string before = save_checkpoint(fx.store());
        const auto bindings = s.bindings;
        Outcome o = fx.invoke(s, name, random_args(op, rng));
        bool expected = std::string(kind) == "division"
                            ? std::holds_alternative<outcome::RuntimeFault>(o)
                            : std::holds_alternative<outcome::HookUnbound>(o);
        if (expected) {
          c.attempted = true;
          c.identical = save_checkpoint(fx.store()) == before && s.bindings == bindings;
        } else if (std::holds_alternative<outcome::Ok>(o)) {
          c.note = "plan completed despite the injected failure";
        }
      }
      if (!c.attempted && c.note.empty())
        c.note = "guard never held in " + std::to_string(kTries) + " attempts";
      out.push_back(c);
    }
  }
  return out;
}

ObjectStore random_store(std::shared_ptr<const Schema> schema, std::mt19937_64& rng, int maxObjects,
                         int maxLinks) {
  static const std::vector<std::string> strings = {"", "a", "Taipa", "quote \" and \\ slash",
                                                   "line\nbreak", "caf\xc3\xa9", "tab\t"};
  ObjectStore store(schema);
  const auto& classes = schema->class_names();
  if (classes.empty()) return store;
  int n = std::uniform_int_distribution<int>(0, maxObjects)(rng);
  std::vector<ObjectId> ids;
  for (int i = 0; i < n; ++i) {
    const std::string& cls = pick(classes, rng);
    ObjectId id = store.create_object(cls).as_ref();
    ids.push_back(id);
    for (const auto& a : schema->at(cls).attributes) {
      if (chance(rng, 0.15)) continue;
      Value v;
      switch (a.type) {
        case PrimType::Integer:
          v = Value::integer(std::uniform_int_distribution<std::int64_t>(-1000000, 1000000)(rng));
          break;
        case PrimType::Real: {
          double x = std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
          if (chance(rng, 0.02)) x = std::numeric_limits<double>::infinity();
          if (chance(rng, 0.02)) x = 0.1 + 0.2;
          v = Value::real(x);
          break;
        }
        case PrimType::Boolean: v = Value::boolean(chance(rng, 0.5)); break;
        case PrimType::String: v = Value::string(pick(strings, rng)); break;
      }
      store.set_attribute(id, a.name, v);
    }
    if (chance(rng, 0.85)) store.add_object(cls, id);
  }
  int links = std::uniform_int_distribution<int>(0, maxLinks)(rng);
  for (int i = 0; i < links && !ids.empty(); ++i) {
    ObjectId src = pick(ids, rng);
    if (!store.exists(src)) continue;
    const ClassInfo& info = schema->at(store.at(src).className);
    if (info.roles.empty()) continue;
    const AssociationEnd& role = pick(info.roles, rng);
    std::vector<ObjectId> targets;
    for (ObjectId t : ids) {
      if (store.exists(t) && schema->conforms_to(store.at(t).className, role.target)) targets.push_back(t);
    }
    if (targets.empty()) continue;
    ObjectId t = pick(targets, rng);
    if (role.multiplicity == Multiplicity::One) store.add_link_one_to_one(src, role.roleName, t);
    else store.add_link_one_to_many(src, role.roleName, t);
  }
  for (ObjectId id : ids) {
    if (chance(rng, 0.08)) store.release_object(store.at(id).className, id);
  }
  return store;
}

std::string replay_transcript(const std::string& transcript) {
  std::istringstream in(transcript);
  std::string line;
  std::string modelFile;
  std::vector<std::string> input;
  while (std::getline(in, line)) {
    if (line.rfind("# model: ", 0) == 0 && modelFile.empty()) modelFile = line.substr(9);
    if (line.rfind("> ", 0) == 0) input.push_back(line.substr(2));
    else if (line.empty() || line[0] == '#') input.push_back(line);
  }
  if (modelFile.empty()) throw std::runtime_error("transcript lacks a '# model:' header");
  LoadedModel m = unwrap(build_model_files({source_dir() + "/fixtures/" + modelFile}, {true}), modelFile);
  Executor ex(m.resolved, m.operations);
  std::ostringstream out;
  Repl repl(ex, out);
  for (const auto& l : input) {
    if (!repl.execute_line(l)) break;
  }
  return out.str();
}

}  // namespace reqexec::testing
