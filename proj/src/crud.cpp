#include "reqexec/crud.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

#include "reqexec/parser.hpp"

namespace reqexec {

namespace {

const std::set<std::string> kReserved = {"and", "or",   "not",  "let",    "in",  "true",
                                         "false", "null", "self", "result", "obj", "existing"};

std::string param_name(const std::string& attr, std::set<std::string>& used) {
  std::string p = attr;
  p[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(p[0])));
  while (kReserved.count(p) || used.count(p)) p = "p" + p;
  used.insert(p);
  return p;
}

}  // namespace

std::string crud_source(const ConceptualClass& cls, const std::string& actor) {
  const std::string& C = cls.name;
  const std::string uc = "Manage" + C;
  std::set<std::string> used;
  std::vector<std::string> params;
  for (const auto& a : cls.attributes) params.push_back(param_name(a.name, used));

  std::ostringstream os;
  if (cls.attributes.empty()) {
    os << "usecase " << uc << " actor " << actor << " { create" << C << "; }\n";
    os << "contract " << uc << "::create" << C << "() : Boolean {\n"
       << "precondition: true\n"
       << "postcondition:\n  let obj:" << C << " in obj.oclIsNew() and\n  " << C
       << ".allInstances()->includes(obj) and\n  result = true\n}\n";
    return os.str();
  }

  const auto& key = cls.attributes[0];
  const std::string& keyParam = params[0];
  auto signature = [&](bool all) {
    std::string s;
    for (std::size_t i = 0; i < (all ? params.size() : 1); ++i) {
      if (i) s += ", ";
      s += params[i] + " : " + to_string(cls.attributes[i].type);
    }
    return s;
  };
  auto existing = [&] {
    return "definition:\n  existing:" + C + " = " + C + ".allInstances()->any(o:" + C + " | o." +
           key.name + " = " + keyParam + ")\n";
  };

  os << "usecase " << uc << " actor " << actor << " { create" << C << "; read" << C << "; update"
     << C << "; delete" << C << "; }\n";

  os << "contract " << uc << "::create" << C << "(" << signature(true) << ") : Boolean {\n"
     << existing() << "precondition: existing.oclIsUndefined() = true\n"
     << "postcondition:\n  let obj:" << C << " in obj.oclIsNew() and\n";
  for (std::size_t i = 0; i < params.size(); ++i)
    os << "  obj." << cls.attributes[i].name << " = " << params[i] << " and\n";
  os << "  " << C << ".allInstances()->includes(obj) and\n  result = true\n}\n";

  os << "contract " << uc << "::read" << C << "(" << signature(false) << ") : " << C << " {\n"
     << existing() << "precondition: true\n"
     << "postcondition: result = existing\n}\n";

  os << "contract " << uc << "::update" << C << "(" << signature(true) << ") : Boolean {\n"
     << existing() << "precondition: existing.oclIsUndefined() = false\n"
     << "postcondition:\n";
  for (std::size_t i = 1; i < params.size(); ++i)
    os << "  existing." << cls.attributes[i].name << " = " << params[i] << " and\n";
  os << "  result = true\n}\n";

  os << "contract " << uc << "::delete" << C << "(" << signature(false) << ") : Boolean {\n"
     << existing() << "precondition: existing.oclIsUndefined() = false\n"
     << "postcondition:\n  " << C << ".allInstances()->excludes(existing) and\n  result = true\n}\n";
  return os.str();
}

RequirementsModel with_crud(const RequirementsModel& model) {
  RequirementsModel out = model;
  std::string actor = model.actors.empty() ? "Administrator" : model.actors.front();
  bool addedActor = false;
  for (const auto& cls : model.classes) {
    if (!cls.crudMarked || model.find_use_case("Manage" + cls.name)) continue;
    if (model.actors.empty() && !addedActor) {
      out.actors.push_back(actor);
      addedActor = true;
    }
    ParseResult r = parse_model({{"<crud " + cls.name + ">", crud_source(cls, actor)}});
    if (!r.ok()) {
      throw std::logic_error("generated CRUD text for " + cls.name +
                             " does not parse: " + to_string(r.diagnostics.front()));
    }
    for (auto& u : r.model->useCases) out.useCases.push_back(std::move(u));
    for (auto& c : r.model->contracts) out.contracts.push_back(std::move(c));
  }
  return out;
}

}  // namespace reqexec
