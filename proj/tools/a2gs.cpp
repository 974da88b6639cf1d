// SPDX-License-Identifier: Apache-2.0
//
// a2gs - air-to-ground switched-array channel sounder simulation and analysis
// Copyright (C) 2026 The a2gs authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// a2gs command-line front end: synth -> b2b -> calibrate -> analyze / report / stability.

#include "a2gs/error.hpp"
#include "a2gs/pipeline.hpp"
#include "a2gs/selftest.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace
{
    using namespace a2gs;

    constexpr int exit_usage = 2;
    constexpr int exit_selftest = 20;
    constexpr int exit_internal = 1;

    struct Options
    {
        std::string scenario;
        std::string out;
        std::string input;
        std::string ref;
        std::optional<double> attenuator_db;
        std::optional<std::uint64_t> seed;
        bool strict_hash = false;
        std::string window = "rect";
        std::string format = "csv";
        int port = 0;
    };

    ScenarioConfig scenario_for(const Options &o, bool b2b_seed = false)
    {
        ScenarioConfig c = load_scenario(o.scenario);
        if (o.seed)
            (b2b_seed ? c.capture.b2b_seed : c.capture.seed) = *o.seed;
        if (o.attenuator_db)
        {
            c.attenuator.nominal_loss_db = *o.attenuator_db;
            c.attenuator.validate();
        }
        return c;
    }

    AttenuatorModel attenuator_for(const Options &o, const std::optional<ScenarioConfig> &c)
    {
        AttenuatorModel a = c ? c->attenuator : AttenuatorModel{};
        if (o.attenuator_db)
            a.nominal_loss_db = *o.attenuator_db;
        a.validate();
        return a;
    }

    // Output stream: the --out file, or stdout when none was given.
    class Output
    {
    public:
        explicit Output(const std::string &path)
        {
            if (path.empty())
                return;
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
            if (!*file_)
                fail(ErrorKind::io, "cannot open " + path + " for writing");
        }

        std::ostream &stream() { return file_ ? *file_ : std::cout; }

    private:
        std::unique_ptr<std::ofstream> file_;
    };

    void check_against(const CaptureFile &f, const ScenarioConfig &c, bool strict)
    {
        check_hashes(f.header, config_hash(c), geometry_hash(c.array), strict, std::cerr);
        require(f.header.ports == c.timing.ports_per_simo && f.header.tones == c.tones, ErrorKind::dimension_mismatch,
                "capture dimensions do not match the scenario");
    }

    // Calibrated series from either a CAL capture or a MEAS capture plus --ref.
    std::vector<CalibratedResponse> calibrated_input(const Options &o, const ScenarioConfig &c)
    {
        const CaptureFile in = read_capture(o.input);
        check_against(in, c, o.strict_hash);
        if (in.header.type == RecordType::calibrated)
            return from_capture_file(in);
        require(!o.ref.empty(), ErrorKind::invalid_argument, "MEAS input needs --ref <b2b capture>");
        const CaptureFile ref = read_capture(o.ref);
        require(ref.header.geometry_hash == in.header.geometry_hash, ErrorKind::dimension_mismatch,
                "reference was captured with a different array geometry");
        return calibrate_capture(in, ref, attenuator_for(o, c));
    }

    Window window_for(const Options &o)
    {
        return o.window == "hann" ? Window::hann : Window::rect;
    }

    int run_synth(const Options &o)
    {
        const ScenarioConfig c = scenario_for(o);
        write_capture(o.out, synthesize_capture(c));
        return 0;
    }

    int run_b2b(const Options &o)
    {
        const ScenarioConfig c = scenario_for(o, true);
        write_capture(o.out, synthesize_b2b(c));
        return 0;
    }

    int run_calibrate(const Options &o)
    {
        std::optional<ScenarioConfig> c;
        if (!o.scenario.empty())
            c = scenario_for(o);
        const CaptureFile meas = read_capture(o.input);
        const CaptureFile ref = read_capture(o.ref);
        if (c)
            check_against(meas, *c, o.strict_hash);
        require(ref.header.geometry_hash == meas.header.geometry_hash, ErrorKind::dimension_mismatch,
                "reference was captured with a different array geometry");
        const auto cal = calibrate_capture(meas, ref, attenuator_for(o, c));
        write_capture(o.out, to_capture_file(cal, meas.header));
        return 0;
    }

    int run_analyze(const Options &o)
    {
        const ScenarioConfig c = scenario_for(o);
        const auto cal = calibrated_input(o, c);
        AnalysisOptions opt;
        opt.window = window_for(o);
        const auto metrics = analyze_series(cal, c, opt);
        Output out(o.out);
        if (o.format == "json")
            out.stream() << summarize(metrics, c, config_hash(c)).dump(2) << '\n';
        else
            write_metrics_csv(out.stream(), metrics, config_hash(c));
        return 0;
    }

    int run_report(const Options &o)
    {
        const ScenarioConfig c = scenario_for(o);
        const auto cal = calibrated_input(o, c);
        AnalysisOptions opt;
        opt.window = window_for(o);
        const auto metrics = analyze_series(cal, c, opt);
        const auto rows = route_report(metrics);
        Output out(o.out);
        write_route_csv(out.stream(), rows, config_hash(c));
        return 0;
    }

    int run_stability(const Options &o)
    {
        const CaptureFile f = read_capture(o.input);
        require(f.header.type == RecordType::b2b, ErrorKind::invalid_argument, "stability expects a B2B capture");
        if (!o.scenario.empty())
            check_against(f, scenario_for(o, true), o.strict_hash);
        const StabilityReport r = stability_stats(f.records, o.port);
        Output out(o.out);
        write_stability_csv(out.stream(), r, f.header.config_hash);
        std::cerr << "amplitude std " << r.amplitude_std_db << " dB, phase std " << r.phase_std_deg << " deg\n";
        return 0;
    }

    int run_selftest()
    {
        return all_passed(a2gs::run_selftest(std::cout)) ? 0 : exit_selftest;
    }
}

int main(int argc, char **argv)
{
    a2gs::tune_allocator();
    CLI::App app{"a2gs: virtual air-to-ground massive MIMO channel sounder"};
    app.require_subcommand(1);
    Options o;

    auto add_scenario = [&](CLI::App *cmd, bool required) {
        auto *opt = cmd->add_option("--scenario", o.scenario, "Scenario JSON document")->check(CLI::ExistingFile);
        if (required)
            opt->required();
    };
    auto add_seed = [&](CLI::App *cmd) { cmd->add_option("--seed", o.seed, "Override the capture seed"); };
    auto add_atten = [&](CLI::App *cmd) {
        cmd->add_option("--attenuator-db", o.attenuator_db, "B2B attenuator loss in dB");
    };
    auto add_strict = [&](CLI::App *cmd) {
        cmd->add_flag("--strict-hash", o.strict_hash, "Fail instead of warning on provenance hash mismatch");
    };
    auto add_window = [&](CLI::App *cmd) {
        cmd->add_option("--window", o.window, "Window before the inverse DFT")->check(CLI::IsMember({"rect", "hann"}));
    };

    auto *synth = app.add_subcommand("synth", "Synthesize a MEAS capture from a scenario");
    add_scenario(synth, true);
    synth->add_option("--out", o.out, "Output capture file")->required();
    add_seed(synth);

    auto *b2b = app.add_subcommand("b2b", "Synthesize a back-to-back (B2B) reference capture");
    add_scenario(b2b, true);
    b2b->add_option("--out", o.out, "Output capture file")->required();
    add_seed(b2b);
    add_atten(b2b);

    auto *cal = app.add_subcommand("calibrate", "Divide out the system response using a B2B reference");
    cal->add_option("input", o.input, "MEAS capture")->required()->check(CLI::ExistingFile);
    cal->add_option("--ref", o.ref, "B2B capture")->required()->check(CLI::ExistingFile);
    cal->add_option("--out", o.out, "Output calibrated (CAL) capture")->required();
    add_scenario(cal, false);
    add_seed(cal);
    add_atten(cal);
    add_strict(cal);

    auto *analyze = app.add_subcommand("analyze", "Per-snapshot metrics (CSV) or scenario summary (JSON)");
    analyze->add_option("input", o.input, "CAL capture, or MEAS capture with --ref")->required()->check(CLI::ExistingFile);
    add_scenario(analyze, true);
    analyze->add_option("--ref", o.ref, "B2B capture when the input is MEAS")->check(CLI::ExistingFile);
    analyze->add_option("--out", o.out, "Output file (default stdout)");
    analyze->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    add_seed(analyze);
    add_atten(analyze);
    add_strict(analyze);
    add_window(analyze);

    auto *stability = app.add_subcommand("stability", "Relative amplitude/phase stability of a B2B series");
    stability->add_option("input", o.input, "B2B capture")->required()->check(CLI::ExistingFile);
    stability->add_option("--port", o.port, "Port to analyze");
    stability->add_option("--out", o.out, "Output CSV (default stdout)");
    add_scenario(stability, false);
    add_seed(stability);
    add_strict(stability);

    auto *report = app.add_subcommand("report", "Route table: per-location column powers and argmax column");
    report->add_option("input", o.input, "CAL capture, or MEAS capture with --ref")->required()->check(CLI::ExistingFile);
    add_scenario(report, true);
    report->add_option("--ref", o.ref, "B2B capture when the input is MEAS")->check(CLI::ExistingFile);
    report->add_option("--out", o.out, "Output CSV (default stdout)");
    add_seed(report);
    add_atten(report);
    add_strict(report);
    add_window(report);

    auto *selftest = app.add_subcommand("selftest", "Run the invariant suite");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_usage;
    }

    try
    {
        if (synth->parsed())
            return run_synth(o);
        if (b2b->parsed())
            return run_b2b(o);
        if (cal->parsed())
            return run_calibrate(o);
        if (analyze->parsed())
            return run_analyze(o);
        if (stability->parsed())
            return run_stability(o);
        if (report->parsed())
            return run_report(o);
        if (selftest->parsed())
            return run_selftest();
    }
    catch (const a2gs::Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return int(e.kind());
    }
    catch (const std::exception &e)
    {
        std::cerr << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
    return exit_usage;
}
