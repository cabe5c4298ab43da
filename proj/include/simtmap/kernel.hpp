#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "simtmap/error.hpp"

namespace simtmap {

enum class InstrClass { kAlu, kLoad, kStore, kBranch, kBarrier };

inline std::string_view to_string(InstrClass c) {
  switch (c) {
    case InstrClass::kAlu: return "alu";
    case InstrClass::kLoad: return "load";
    case InstrClass::kStore: return "store";
    case InstrClass::kBranch: return "branch";
    case InstrClass::kBarrier: return "barrier";
  }
  return "?";
}

inline InstrClass parse_instr_class(std::string_view text) {
  if (text == "alu") return InstrClass::kAlu;
  if (text == "load") return InstrClass::kLoad;
  if (text == "store") return InstrClass::kStore;
  if (text == "branch") return InstrClass::kBranch;
  if (text == "barrier") return InstrClass::kBarrier;
  throw FormatError("unknown instruction class \"" + std::string(text) + "\"");
}

// Semantic tag of a PC range. Body PCs may carry a kernel-specific
// sub-section label, named "body.<sub>".
struct Section {
  enum class Kind { kInit, kDispatch, kBody, kLoopOverhead, kEpilogue };

  Kind kind = Kind::kBody;
  std::string sub;  // nonempty only for kBody

  friend bool operator==(const Section&, const Section&) = default;

  std::string name() const {
    switch (kind) {
      case Kind::kInit: return "init";
      case Kind::kDispatch: return "dispatch";
      case Kind::kBody: return sub.empty() ? "body" : "body." + sub;
      case Kind::kLoopOverhead: return "loop-overhead";
      case Kind::kEpilogue: return "epilogue";
    }
    return "?";
  }

  static Section parse(std::string_view text) {
    if (text == "init") return {Kind::kInit, {}};
    if (text == "dispatch") return {Kind::kDispatch, {}};
    if (text == "body") return {Kind::kBody, {}};
    if (text.rfind("body.", 0) == 0 && text.size() > 5)
      return {Kind::kBody, std::string(text.substr(5))};
    if (text == "loop-overhead") return {Kind::kLoopOverhead, {}};
    if (text == "epilogue") return {Kind::kEpilogue, {}};
    throw FormatError("unknown section name \"" + std::string(text) + "\"");
  }
};

// One template instruction. Irregular marks memory accesses whose
// latency scales by LatencyModel::irregular_load_multiplier.
struct Instruction {
  InstrClass cls = InstrClass::kAlu;
  Section section;
  bool irregular = false;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

// A concrete kernel ready to simulate: the per-call prologue/epilogue,
// the per-iteration body and loop bookkeeping, and the gws it produces.
// PCs index the concatenation prologue|body|loop_overhead|epilogue.
class KernelInstance {
 public:
  KernelInstance(std::string name, std::int64_t gws, std::vector<Instruction> prologue,
                 std::vector<Instruction> body, std::vector<Instruction> loop_overhead,
                 std::vector<Instruction> epilogue)
      : name_(std::move(name)), gws_(gws) {
    if (gws_ < 1) throw UsageError("kernel \"" + name_ + "\": gws must be >= 1");
    bool has_mem = false, has_alu = false;
    for (const auto& i : body) {
      has_mem |= i.cls == InstrClass::kLoad || i.cls == InstrClass::kStore;
      has_alu |= i.cls == InstrClass::kAlu;
    }
    if (body.empty() || !has_mem || !has_alu)
      throw UsageError("kernel \"" + name_ +
                       "\": body needs at least one load/store and one alu instruction");
    code_ = std::move(prologue);
    body_begin_ = static_cast<std::int64_t>(code_.size());
    code_.insert(code_.end(), body.begin(), body.end());
    loop_begin_ = static_cast<std::int64_t>(code_.size());
    code_.insert(code_.end(), loop_overhead.begin(), loop_overhead.end());
    epilogue_begin_ = static_cast<std::int64_t>(code_.size());
    code_.insert(code_.end(), epilogue.begin(), epilogue.end());
  }

  const std::string& name() const { return name_; }
  std::int64_t gws() const { return gws_; }
  std::int64_t pc_count() const { return static_cast<std::int64_t>(code_.size()); }

  std::span<const Instruction> prologue() const {
    return {code_.data(), static_cast<std::size_t>(body_begin_)};
  }
  std::span<const Instruction> body() const {
    return {code_.data() + body_begin_, static_cast<std::size_t>(loop_begin_ - body_begin_)};
  }
  std::span<const Instruction> loop_overhead() const {
    return {code_.data() + loop_begin_, static_cast<std::size_t>(epilogue_begin_ - loop_begin_)};
  }
  std::span<const Instruction> epilogue() const {
    return {code_.data() + epilogue_begin_, code_.size() - epilogue_begin_};
  }

  std::int64_t body_begin() const { return body_begin_; }
  std::int64_t loop_begin() const { return loop_begin_; }
  std::int64_t epilogue_begin() const { return epilogue_begin_; }

  const Instruction& at(std::int64_t pc) const { return code_.at(static_cast<std::size_t>(pc)); }
  const Section& section_of(std::int64_t pc) const { return at(pc).section; }
  InstrClass class_of(std::int64_t pc) const { return at(pc).cls; }

  friend bool operator==(const KernelInstance&, const KernelInstance&) = default;

 private:
  std::string name_;
  std::int64_t gws_;
  std::vector<Instruction> code_;
  std::int64_t body_begin_ = 0;
  std::int64_t loop_begin_ = 0;
  std::int64_t epilogue_begin_ = 0;
};

using ParamMap = std::map<std::string, std::int64_t>;

struct ParamSpec {
  std::string name;
  std::int64_t default_value;
};

// A parameterized kernel model. build() expects a fully resolved
// parameter map (instantiate() merges defaults and validates).
struct KernelDescriptor {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
  std::function<std::int64_t(const ParamMap&)> gws_of;
  std::function<KernelInstance(const ParamMap&)> build;
};

inline ParamMap resolve_params(const KernelDescriptor& k, const ParamMap& given) {
  ParamMap full;
  for (const auto& p : k.params) full[p.name] = p.default_value;
  for (const auto& [key, value] : given) {
    if (!full.count(key))
      throw UsageError("kernel \"" + k.name + "\" has no parameter \"" + key + "\"");
    if (value < 1)
      throw UsageError("kernel \"" + k.name + "\": parameter " + key + " must be >= 1, got " +
                       std::to_string(value));
    full[key] = value;
  }
  return full;
}

inline KernelInstance instantiate(const KernelDescriptor& k, const ParamMap& given = {}) {
  return k.build(resolve_params(k, given));
}

inline std::int64_t gws_of(const KernelDescriptor& k, const ParamMap& given = {}) {
  return k.gws_of(resolve_params(k, given));
}

namespace detail {

inline std::vector<Instruction> standard_prologue() {
  const Section init{Section::Kind::kInit, {}};
  const Section dispatch{Section::Kind::kDispatch, {}};
  return {{InstrClass::kAlu, init}, {InstrClass::kAlu, init},
          {InstrClass::kLoad, dispatch}, {InstrClass::kBranch, dispatch}};
}

inline std::vector<Instruction> standard_loop_overhead() {
  const Section loop{Section::Kind::kLoopOverhead, {}};
  return {{InstrClass::kAlu, loop}, {InstrClass::kBranch, loop}};
}

inline std::vector<Instruction> standard_epilogue() {
  const Section epi{Section::Kind::kEpilogue, {}};
  return {{InstrClass::kBarrier, epi}, {InstrClass::kBranch, epi}};
}

inline void repeat(std::vector<Instruction>& into, std::int64_t times,
                   std::initializer_list<Instruction> group) {
  for (std::int64_t i = 0; i < times; ++i) into.insert(into.end(), group);
}

}  // namespace detail

// The built-in kernel models. Bodies are instruction-count templates
// with data-independent control flow; they stand in for compiled OpenCL
// kernels without executing any arithmetic.
inline const std::vector<KernelDescriptor>& builtin_catalog() {
  static const std::vector<KernelDescriptor> catalog = [] {
    const Section body{Section::Kind::kBody, {}};
    const auto I = [](InstrClass c, Section s, bool irr = false) {
      return Instruction{c, std::move(s), irr};
    };
    std::vector<KernelDescriptor> ks;

    // vecadd: one output element per iteration, c[i] = a[i] + b[i].
    ks.push_back({
        "vecadd",
        "elementwise vector addition",
        {{"n", 128}},
        [](const ParamMap& p) { return p.at("n"); },
        [=](const ParamMap& p) {
          std::vector<Instruction> b = {I(InstrClass::kLoad, body), I(InstrClass::kLoad, body),
                                        I(InstrClass::kAlu, body), I(InstrClass::kStore, body)};
          return KernelInstance("vecadd", p.at("n"), detail::standard_prologue(), b,
                                detail::standard_loop_overhead(), detail::standard_epilogue());
        },
    });

    // saxpy: y[i] = a * x[i] + y[i].
    ks.push_back({
        "saxpy",
        "scaled vector addition",
        {{"n", 128}},
        [](const ParamMap& p) { return p.at("n"); },
        [=](const ParamMap& p) {
          std::vector<Instruction> b = {I(InstrClass::kLoad, body), I(InstrClass::kLoad, body),
                                        I(InstrClass::kAlu, body), I(InstrClass::kAlu, body),
                                        I(InstrClass::kStore, body)};
          return KernelInstance("saxpy", p.at("n"), detail::standard_prologue(), b,
                                detail::standard_loop_overhead(), detail::standard_epilogue());
        },
    });

    // sgemm-tile: one output element per iteration, register-tiled
    // inner product over k -> two ALU ops per loaded operand.
    ks.push_back({
        "sgemm-tile",
        "tiled matrix-multiply inner product",
        {{"m", 16}, {"n", 16}, {"k", 16}},
        [](const ParamMap& p) { return p.at("m") * p.at("n"); },
        [=](const ParamMap& p) {
          std::vector<Instruction> b;
          detail::repeat(b, p.at("k"),
                         {I(InstrClass::kLoad, body), I(InstrClass::kAlu, body),
                          I(InstrClass::kAlu, body)});
          b.push_back(I(InstrClass::kAlu, body));
          b.push_back(I(InstrClass::kStore, body));
          return KernelInstance("sgemm-tile", p.at("m") * p.at("n"), detail::standard_prologue(),
                                b, detail::standard_loop_overhead(), detail::standard_epilogue());
        },
    });

    // gaussian-blur-1d: stencil with 2*radius+1 overlapping loads.
    ks.push_back({
        "gaussian-blur-1d",
        "1-D stencil filter",
        {{"n", 128}, {"radius", 2}},
        [](const ParamMap& p) { return p.at("n"); },
        [=](const ParamMap& p) {
          std::vector<Instruction> b;
          detail::repeat(b, 2 * p.at("radius") + 1,
                         {I(InstrClass::kLoad, body), I(InstrClass::kAlu, body)});
          b.push_back(I(InstrClass::kStore, body));
          return KernelInstance("gaussian-blur-1d", p.at("n"), detail::standard_prologue(), b,
                                detail::standard_loop_overhead(), detail::standard_epilogue());
        },
    });

    // nearest-neighbor: per query, a data-independent compare/select
    // chain over the reference set.
    ks.push_back({
        "nearest-neighbor",
        "nearest-neighbor reduction",
        {{"n", 64}, {"refs", 8}},
        [](const ParamMap& p) { return p.at("n"); },
        [=](const ParamMap& p) {
          std::vector<Instruction> b;
          detail::repeat(b, p.at("refs"),
                         {I(InstrClass::kLoad, body), I(InstrClass::kAlu, body),
                          I(InstrClass::kAlu, body)});
          b.push_back(I(InstrClass::kStore, body));
          return KernelInstance("nearest-neighbor", p.at("n"), detail::standard_prologue(), b,
                                detail::standard_loop_overhead(), detail::standard_epilogue());
        },
    });

    // gcn-aggregate: neighbor gathers are irregular loads; degree is the
    // average neighborhood size.
    ks.push_back({
        "gcn-aggregate",
        "graph-convolution feature aggregation",
        {{"n", 64}, {"degree", 4}},
        [](const ParamMap& p) { return p.at("n"); },
        [=](const ParamMap& p) {
          std::vector<Instruction> b;
          detail::repeat(b, p.at("degree"),
                         {I(InstrClass::kLoad, body, true), I(InstrClass::kAlu, body)});
          b.push_back(I(InstrClass::kAlu, body));
          b.push_back(I(InstrClass::kStore, body));
          return KernelInstance("gcn-aggregate", p.at("n"), detail::standard_prologue(), b,
                                detail::standard_loop_overhead(), detail::standard_epilogue());
        },
    });

    // dnn-dense-layer: sgemm-tile inner product plus bias and activation
    // sub-sections.
    ks.push_back({
        "dnn-dense-layer",
        "dense layer: matmul + bias + activation",
        {{"m", 16}, {"n", 16}, {"k", 16}},
        [](const ParamMap& p) { return p.at("m") * p.at("n"); },
        [=](const ParamMap& p) {
          const Section matmul{Section::Kind::kBody, "matmul"};
          const Section bias{Section::Kind::kBody, "bias"};
          const Section act{Section::Kind::kBody, "activation"};
          std::vector<Instruction> b;
          detail::repeat(b, p.at("k"),
                         {I(InstrClass::kLoad, matmul), I(InstrClass::kAlu, matmul),
                          I(InstrClass::kAlu, matmul)});
          b.push_back(I(InstrClass::kLoad, bias));
          b.push_back(I(InstrClass::kAlu, bias));
          b.push_back(I(InstrClass::kAlu, act));
          b.push_back(I(InstrClass::kStore, act));
          return KernelInstance("dnn-dense-layer", p.at("m") * p.at("n"),
                                detail::standard_prologue(), b, detail::standard_loop_overhead(),
                                detail::standard_epilogue());
        },
    });

    return ks;
  }();
  return catalog;
}

// Catalog lookup; nullptr when the name is absent.
inline const KernelDescriptor* find_kernel(std::string_view name) {
  for (const auto& k : builtin_catalog())
    if (k.name == name) return &k;
  return nullptr;
}

// Loads a kernel template from the declarative text format:
//   [section-name]           starts a section (init, dispatch, body,
//                            body.<sub>, loop-overhead, epilogue)
//   <class> [irregular]      appends one instruction to it
// '#' comments and blank lines are ignored; an optional "name <id>" line
// may precede the first section. The kernel takes a single parameter n
// (default 128) with gws = n.
inline KernelDescriptor parse_kernel_file(std::istream& in, const std::string& default_name) {
  std::string name = default_name;
  std::vector<Instruction> prologue, body, loop_overhead, epilogue;
  std::optional<Section> current;
  std::string line;
  int line_no = 0;

  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };

  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::string at = " (line " + std::to_string(line_no) + ")";

    if (line.front() == '[') {
      if (line.back() != ']') throw FormatError("kernel file: unterminated section header" + at);
      try {
        current = Section::parse(trim(line.substr(1, line.size() - 2)));
      } catch (const FormatError& e) {
        throw FormatError(std::string("kernel file: ") + e.what() + at);
      }
      continue;
    }

    std::istringstream fields(line);
    std::string first, attr;
    fields >> first >> attr;
    if (!current) {
      if (first == "name" && !attr.empty()) {
        name = attr;
        continue;
      }
      throw FormatError("kernel file: instruction before any [section] header" + at);
    }
    Instruction instr;
    try {
      instr.cls = parse_instr_class(first);
    } catch (const FormatError& e) {
      throw FormatError(std::string("kernel file: ") + e.what() + at);
    }
    if (!attr.empty()) {
      if (attr != "irregular")
        throw FormatError("kernel file: unknown attribute \"" + attr + "\"" + at);
      instr.irregular = true;
    }
    instr.section = *current;
    switch (current->kind) {
      case Section::Kind::kInit:
      case Section::Kind::kDispatch: prologue.push_back(instr); break;
      case Section::Kind::kBody: body.push_back(instr); break;
      case Section::Kind::kLoopOverhead: loop_overhead.push_back(instr); break;
      case Section::Kind::kEpilogue: epilogue.push_back(instr); break;
    }
  }

  if (body.empty()) throw FormatError("kernel file: no [body] instructions");

  KernelDescriptor k;
  k.name = name;
  k.summary = "user kernel";
  k.params = {{"n", 128}};
  k.gws_of = [](const ParamMap& p) { return p.at("n"); };
  k.build = [name, prologue, body, loop_overhead, epilogue](const ParamMap& p) {
    return KernelInstance(name, p.at("n"), prologue, body, loop_overhead, epilogue);
  };
  return k;
}

inline KernelDescriptor load_kernel_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("kernel file: cannot open \"" + path + "\"");
  auto stem = [](const std::string& p) {
    const auto slash = p.find_last_of("/\\");
    std::string base = slash == std::string::npos ? p : p.substr(slash + 1);
    const auto dot = base.find_last_of('.');
    return dot == std::string::npos || dot == 0 ? base : base.substr(0, dot);
  };
  return parse_kernel_file(in, stem(path));
}

}  // namespace simtmap
