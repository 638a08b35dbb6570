#include "hypotor/runner.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"hypotor: exact analyzer for torus vector-field perturbations"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "execute the tasks of a spec file");
    std::string spec_path;
    std::vector<std::string> only;
    std::string out_dir;
    bool parallel = false;
    run->add_option("spec", spec_path, "spec file (json)")->required();
    run->add_option("--only", only, "run only these task ids")->delimiter(',');
    run->add_option("--out", out_dir, "output directory for report.json and CSV tables");
    run->add_flag("--parallel", parallel, "run independent tasks concurrently");

    auto* csv = app.add_subcommand("csv", "render a CSV table from a report.json");
    std::string report_path, table;
    csv->add_option("report", report_path, "report.json path")->required();
    csv->add_option("table", table, "shells | modes | fits")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            hypotor::RunOptions opts;
            opts.only = only;
            opts.out_dir = out_dir;
            opts.parallel = parallel;
            hypotor::RunResult result = hypotor::run_file(spec_path, opts);
            std::cout << hypotor::report_to_string(result.report);
            return result.exit_code;
        }
        if (csv->parsed()) {
            std::ifstream in(report_path);
            if (!in) throw hypotor::ParseError("cannot open report: " + report_path);
            hypotor::Json rep = hypotor::Json::parse(in);
            hypotor::CsvTable which;
            if (table == "shells")
                which = hypotor::CsvTable::Shells;
            else if (table == "modes")
                which = hypotor::CsvTable::Modes;
            else if (table == "fits")
                which = hypotor::CsvTable::Fits;
            else
                throw hypotor::ParseError("unknown table: " + table);
            std::cout << hypotor::render_csv(rep, which);
            return 0;
        }
    } catch (const hypotor::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return hypotor::kExitParseError;
    } catch (const hypotor::PreconditionViolation& e) {
        std::fprintf(stderr, "precondition violation: %s\n", e.what());
        return hypotor::kExitPrecondition;
    } catch (const hypotor::RefinementExhausted& e) {
        std::fprintf(stderr, "refinement exhausted: %s\n", e.what());
        return hypotor::kExitRefinementExhausted;
    }
    return 0;
}
