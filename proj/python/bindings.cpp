#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nvlang/driver.hpp"

namespace py = pybind11;
using namespace nvlang;

namespace {

py::dict diagnosticDict(const driver::Diagnostic& d) {
  py::dict out;
  out["file"] = d.file;
  out["line"] = d.span.line;
  out["column"] = d.span.column;
  out["kind"] = std::string(errorKindName(d.kind));
  out["message"] = d.message;
  out["text"] = driver::format(d);
  return out;
}

py::tuple wrap(driver::CheckResult r) {
  py::list diags;
  for (const auto& d : r.diagnostics) diags.append(diagnosticDict(d));
  if (!r.ok()) return py::make_tuple(py::none(), diags);
  std::shared_ptr<driver::Compilation> unit(std::move(r.unit));
  return py::make_tuple(py::cast(unit), diags);
}

py::dict runResult(const rt::RunResult& r) {
  py::dict out;
  out["status"] = rt::statusName(r.status);
  out["value"] = r.valueText;
  out["output"] = r.output;
  out["error"] = r.error;
  out["steps"] = r.steps;
  out["ticks"] = r.ticks;
  out["messages"] = r.messages;
  py::list trace;
  for (const auto& e : r.trace) {
    py::dict ev;
    ev["tick"] = e.tick;
    ev["kind"] = e.kind;
    ev["pid"] = e.pid;
    ev["detail"] = e.detail;
    trace.append(ev);
  }
  out["trace"] = trace;
  return out;
}

}  // namespace

PYBIND11_MODULE(_nvlang, m) {
  m.doc() = "NVLang front end, Core Erlang generator and reference interpreter";

  py::class_<driver::Compilation, std::shared_ptr<driver::Compilation>>(m, "Compilation")
      .def_property_readonly("entry", [](const driver::Compilation& c) { return c.graph.entry; })
      .def("dump", [](const driver::Compilation& c, const std::string& phase) {
        if (phase == "tokens") return driver::dumpTokens(c);
        if (phase == "ast") return driver::dumpAst(c);
        if (phase == "types") return driver::dumpTypes(c);
        if (phase == "actors") return driver::dumpActors(c);
        if (phase == "anf") return driver::dumpAnf(c);
        throw py::value_error("unknown phase '" + phase + "'");
      }, py::arg("phase"))
      .def("core", [](const driver::Compilation& c, bool plainWire) {
        coregen::CoreOptions o;
        o.plainWireFormat = plainWire;
        py::dict out;
        for (const auto& doc : driver::emitCore(c, o)) out[py::str(doc.module)] = doc.text();
        return out;
      }, py::arg("plain_wire") = false)
      .def("run", [](const driver::Compilation& c, std::uint64_t seed, bool trace, std::uint64_t maxSteps) {
        rt::RunOptions o;
        o.seed = seed;
        o.recordTrace = trace;
        o.maxSteps = maxSteps;
        rt::RunResult r;
        {
          py::gil_scoped_release release;
          r = driver::run(c, o);
        }
        return runResult(r);
      }, py::arg("seed") = 42, py::arg("trace") = false, py::arg("max_steps") = 500'000'000ULL);

  m.def("check_source", [](const std::string& text, const std::string& name,
                           const std::vector<std::filesystem::path>& paths) {
    return wrap(driver::checkSource(name, text, driver::searchPath(paths)));
  }, py::arg("text"), py::arg("name") = "main", py::arg("paths") = std::vector<std::filesystem::path>{});

  m.def("check_file", [](const std::filesystem::path& file, const std::vector<std::filesystem::path>& paths) {
    return wrap(driver::checkFile(file, driver::searchPath(paths)));
  }, py::arg("file"), py::arg("paths") = std::vector<std::filesystem::path>{});

  m.def("erlc_available", &coregen::erlcAvailable);
}
