#include "hypotor/runner.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hypotor;

namespace {

std::pair<std::string, int> run_spec_string(const std::string& text, bool parallel) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("json parse error: ") + e.what());
    }
    SpecFile spec = parse_spec_json(j);
    RunOptions opts;
    opts.parallel = parallel;
    RunResult res = run_spec(spec, opts);
    return {report_to_string(res.report), res.exit_code};
}

std::pair<std::string, int> run_file_py(const std::string& path, const std::string& out_dir,
                                        const std::vector<std::string>& only, bool parallel) {
    RunOptions opts;
    opts.out_dir = out_dir;
    opts.only = only;
    opts.parallel = parallel;
    RunResult res = run_file(path, opts);
    return {report_to_string(res.report), res.exit_code};
}

std::string render_csv_py(const std::string& report_text, const std::string& table) {
    Json rep = Json::parse(report_text);
    CsvTable which;
    if (table == "shells")
        which = CsvTable::Shells;
    else if (table == "modes")
        which = CsvTable::Modes;
    else if (table == "fits")
        which = CsvTable::Fits;
    else
        throw ParseError("unknown table: " + table);
    return render_csv(rep, which);
}

}  // namespace

PYBIND11_MODULE(_hypotor, m) {
    m.doc() = "exact analyzer for perturbations of constant/tube-type vector fields on tori";

    py::register_exception<ParseError>(m, "SpecParseError", PyExc_ValueError);
    py::register_exception<PreconditionViolation>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<RefinementExhausted>(m, "RefinementExhaustedError",
                                                PyExc_RuntimeError);

    m.def("version", [] { return std::string("hypotor 1.0.0"); });
    m.def("run_spec_string", &run_spec_string, py::arg("spec_json"),
          py::arg("parallel") = false,
          "Run the tasks of a spec document (JSON text); returns (report_json, exit_code).");
    m.def("run_file", &run_file_py, py::arg("path"), py::arg("out_dir") = std::string(),
          py::arg("only") = std::vector<std::string>{}, py::arg("parallel") = false,
          "Run a spec file; optionally writes report.json and CSV tables to out_dir.");
    m.def("render_csv", &render_csv_py, py::arg("report_json"), py::arg("table"),
          "Render the shells/modes/fits table of a report as CSV text.");
}
