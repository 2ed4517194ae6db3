#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "ilwb/definability.hpp"
#include "ilwb/errors.hpp"
#include "ilwb/interp.hpp"
#include "ilwb/json_io.hpp"
#include "ilwb/morley.hpp"
#include "ilwb/verify.hpp"

namespace {

using namespace ilwb;

constexpr int kExitPass = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void writeOutput(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

Json loadJson(const std::string& path) {
  return Json::parse(readFile(path));
}

class UsageError : public Error {
public:
  using Error::Error;
};

void requireBigFlag(int cap, bool acknowledged) {
  if (cap >= 5 && !acknowledged)
    throw UsageError("caps >= 5 grow factorially; pass --i-know-this-is-big to proceed");
}

// Free variables are collected in order of first appearance, so formulas on
// the command line do not need a separate context declaration.
Formula parseFormulaInferring(const std::string& text, const Language& language,
                              std::vector<std::string>& names) {
  for (int attempts = 0; attempts < 64; ++attempts) {
    try {
      return parseFormula(text, names, language);
    } catch (const ParseError& e) {
      const std::string what = e.what();
      const std::string tag = "unbound variable ";
      size_t pos = what.find(tag);
      if (pos == std::string::npos) throw;
      std::string var = what.substr(pos + tag.size());
      var = var.substr(0, var.find(' '));
      names.push_back(var);
    }
  }
  throw Error("too many free variables in formula");
}

int runCheckTheory(const std::string& path, bool print) {
  auto [language, theory] = parseTheory(readFile(path));
  std::ostringstream out;
  out << "ok: " << language.relations.size() << " relations, "
      << theory.coherentAxioms.size() << " axioms, " << theory.sentences.size()
      << " sentences";
  if (language.decidabilityWitness) out << ", decidable";
  out << "\n";
  if (print) out << printTheory(theory);
  std::cout << out.str();
  return kExitPass;
}

int runModels(const std::string& theoryPath, int cap, bool big, long long budget,
              const std::string& outPath) {
  requireBigFlag(cap, big);
  auto [language, theory] = parseTheory(readFile(theoryPath));
  std::vector<FiniteModel> models = enumerateModels(language, theory, cap, budget);
  writeOutput(outPath, modelSetToJson(models).dump(2) + "\n");
  return kExitPass;
}

int runEval(const std::string& theoryPath, const std::string& modelPath,
            const std::string& formulaText, std::vector<std::string> names) {
  auto [language, theory] = parseTheory(readFile(theoryPath));
  FiniteModel model = modelFromJson(loadJson(modelPath), language);
  Formula f = parseFormulaInferring(formulaText, language, names);
  std::cout << tupleSetToJson(evalFormula(f, model)).dump(2) << "\n";
  return kExitPass;
}

int runMorleyize(const std::string& theoryPath, const std::vector<std::string>& seedTexts,
                 bool withNeq, const std::string& outTheory, const std::string& outMap) {
  auto [language, theory] = parseTheory(readFile(theoryPath));
  std::vector<Formula> seeds;
  for (const CoherentAxiom& ax : theory.coherentAxioms) {
    if (ax.lhs.kind() != FormulaKind::True && ax.lhs.kind() != FormulaKind::False)
      seeds.push_back(ax.lhs);
    if (ax.rhs.kind() != FormulaKind::True && ax.rhs.kind() != FormulaKind::False)
      seeds.push_back(ax.rhs);
  }
  for (const Formula& s : theory.sentences) seeds.push_back(s);
  for (const std::string& text : seedTexts) {
    std::vector<std::string> names;
    seeds.push_back(parseFormulaInferring(text, language, names));
  }
  if (withNeq) seeds.push_back(Formula::negation(Formula::eq(0, 1, 2)));
  Fragment fragment = fragmentClose(seeds, language);
  MorleyResult result = morleyize(language, theory, fragment);
  Theory emitted = result.targetTheory;
  emitted.language = result.targetLanguage;
  writeOutput(outTheory, printTheory(emitted));
  writeOutput(outMap, morleyMapToJson(result).dump(2) + "\n");
  return kExitPass;
}

int runInterpApply(const std::string& interpPath, const std::string& modelPath, int cap) {
  Interpretation interp = interpretationFromJson(loadJson(interpPath));
  InterpretationReport report = validateInterpretation(interp, cap);
  if (!report.valid) {
    std::cerr << "interpretation fails validation at cap " << cap << "\n";
    return kExitVerificationFailure;
  }
  FiniteModel model = modelFromJson(loadJson(modelPath), interp.targetLanguage);
  std::cout << modelToJson(applyToModel(interp, model)).dump(2) << "\n";
  return kExitPass;
}

int runDefineSynth(const std::string& theoryPath, int cap, bool big, long long budget,
                   const std::string& targetPath, int capN) {
  requireBigFlag(cap, big);
  auto [language, theory] = parseTheory(readFile(theoryPath));
  GroupoidSlice slice = buildGroupoidSlice(language, theory, cap, budget);
  Json target = loadJson(targetPath);
  if (capN <= 0) capN = cap;

  int pointArity = target.at("pointArity").get<int>();
  FiberedSort xn = buildFiberedSort(homePowerSort(pointArity), slice);

  BorelDescriptor::Ptr descriptor;
  if (target.contains("descriptor")) {
    descriptor = descriptorFromJson(target.at("descriptor"), language);
  } else if (target.contains("points")) {
    FiberSet points = FiberSet::empty(xn);
    for (const Json& p : target.at("points"))
      points.insert(p.at(0).get<int>(), p.at(1).get<int>());
    descriptor = descriptorForPointSet(points, xn, pointArity);
  } else {
    throw Error("target JSON needs \"points\" or \"descriptor\"");
  }

  FiberSet wanted = evalDescriptor(descriptor, xn);
  Formula phi = synthesizeInvariantBorel(descriptor, xn, language, capN);
  FiberSet defined = evalFormulaSection(phi, {}, xn);

  Json out;
  out["context"] = phi.contextSize();
  out["formula"] = printFormula(phi);
  Json verification;
  verification["exact"] = defined == wanted;
  verification["targetPoints"] = static_cast<int>(wanted.count());
  verification["definedPoints"] = static_cast<int>(defined.count());
  verification["cap"] = cap;
  verification["capN"] = capN;
  out["verification"] = verification;
  std::cout << out.dump(2) << "\n";
  return defined == wanted ? kExitPass : kExitVerificationFailure;
}

int runGroupoidDump(const std::string& theoryPath, int cap, bool big, long long budget,
                    const std::string& sortPath, const std::string& outPath) {
  requireBigFlag(cap, big);
  auto [language, theory] = parseTheory(readFile(theoryPath));
  GroupoidSlice slice = buildGroupoidSlice(language, theory, cap, budget);
  Json j = sliceToJson(slice);
  if (!sortPath.empty()) {
    ImaginarySort sort = sortFromJson(loadJson(sortPath), language);
    j["fiberedSort"] = fiberedSortToJson(buildFiberedSort(sort, slice));
  }
  writeOutput(outPath, j.dump(2) + "\n");
  return kExitPass;
}

int runVerify(const std::string& suite, int cap, bool big, long long budget, uint64_t seed,
              const std::string& format) {
  requireBigFlag(cap, big);
  RunConfig config;
  config.universeCap = cap;
  config.budget = budget;
  config.seed = seed;
  config.outputFormat = format == "json" ? RunConfig::Format::Json : RunConfig::Format::Text;
  VerifyReport report = runVerifySuite(config, suite);
  if (config.outputFormat == RunConfig::Format::Json)
    std::cout << reportToJson(report).dump(2) << "\n";
  else
    std::cout << reportToText(report);
  return report.allPass() ? kExitPass : kExitVerificationFailure;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for countable infinitary first-order theories"};
  app.require_subcommand(1);

  std::string theoryPath, modelPath, interpPath, targetPath, sortPath;
  std::string formulaText, outPath, outTheory = "-", outMap = "-";
  std::vector<std::string> varNames, seedTexts;
  std::string suite = "all", format = "text";
  int cap = 3, capN = 0;
  long long budget = 1000000;
  uint64_t seed = 0;
  bool big = false, print = false, withNeq = false;

  CLI::App* checkCmd = app.add_subcommand("check-theory", "parse a theory file and report");
  checkCmd->add_option("file", theoryPath)->required();
  checkCmd->add_flag("--print", print, "echo the canonicalized theory");

  CLI::App* modelsCmd = app.add_subcommand("models", "enumerate models up to a cap");
  modelsCmd->add_option("--theory", theoryPath)->required();
  modelsCmd->add_option("--cap", cap);
  modelsCmd->add_option("--budget", budget);
  modelsCmd->add_option("--out", outPath);
  modelsCmd->add_flag("--i-know-this-is-big", big);

  CLI::App* evalCmd = app.add_subcommand("eval", "evaluate a formula in a model");
  evalCmd->add_option("--theory", theoryPath)->required();
  evalCmd->add_option("--model", modelPath)->required();
  evalCmd->add_option("--formula", formulaText)->required();
  evalCmd->add_option("--vars", varNames, "free variable names, in order");

  CLI::App* morleyCmd = app.add_subcommand("morleyize", "Morleyize a theory over a fragment");
  morleyCmd->add_option("--theory", theoryPath)->required();
  morleyCmd->add_option("--seed-formula", seedTexts, "extra fragment seeds");
  morleyCmd->add_flag("--with-neq", withNeq, "seed the fragment with x != y");
  morleyCmd->add_option("--out-theory", outTheory);
  morleyCmd->add_option("--out-map", outMap);

  CLI::App* interpCmd = app.add_subcommand("interp-apply", "transport a model along an interpretation");
  interpCmd->add_option("--interp", interpPath)->required();
  interpCmd->add_option("--model", modelPath)->required();
  interpCmd->add_option("--cap", cap);

  CLI::App* synthCmd = app.add_subcommand("define-synth", "synthesize a defining formula");
  synthCmd->add_option("--theory", theoryPath)->required();
  synthCmd->add_option("--cap", cap);
  synthCmd->add_option("--capn", capN, "extension-tuple bound (defaults to --cap)");
  synthCmd->add_option("--budget", budget);
  synthCmd->add_option("--target", targetPath)->required();
  synthCmd->add_flag("--i-know-this-is-big", big);

  CLI::App* dumpCmd = app.add_subcommand("groupoid-dump", "dump the groupoid slice as JSON");
  dumpCmd->add_option("--theory", theoryPath)->required();
  dumpCmd->add_option("--cap", cap);
  dumpCmd->add_option("--budget", budget);
  dumpCmd->add_option("--sort", sortPath, "also dump this sort's fibers and action");
  dumpCmd->add_option("--out", outPath);
  dumpCmd->add_flag("--i-know-this-is-big", big);

  CLI::App* verifyCmd = app.add_subcommand("verify", "run a verification suite");
  verifyCmd->add_option("--suite", suite)
      ->check(CLI::IsMember(
          {"morley", "pretopos", "groupoid", "vaught", "definability", "interp", "all"}));
  verifyCmd->add_option("--cap", cap);
  verifyCmd->add_option("--budget", budget);
  verifyCmd->add_option("--seed", seed);
  verifyCmd->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
  verifyCmd->add_flag("--i-know-this-is-big", big);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (checkCmd->parsed()) return runCheckTheory(theoryPath, print);
    if (modelsCmd->parsed()) return runModels(theoryPath, cap, big, budget, outPath);
    if (evalCmd->parsed()) return runEval(theoryPath, modelPath, formulaText, varNames);
    if (morleyCmd->parsed()) return runMorleyize(theoryPath, seedTexts, withNeq, outTheory, outMap);
    if (interpCmd->parsed()) return runInterpApply(interpPath, modelPath, cap);
    if (synthCmd->parsed()) return runDefineSynth(theoryPath, cap, big, budget, targetPath, capN);
    if (dumpCmd->parsed()) return runGroupoidDump(theoryPath, cap, big, budget, sortPath, outPath);
    if (verifyCmd->parsed()) return runVerify(suite, cap, big, budget, seed, format);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const Json::exception& e) {
    std::cerr << "json error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerificationFailure;
  }
  return kExitUsage;
}
