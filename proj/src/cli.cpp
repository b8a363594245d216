#include "lobrate/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lobrate/analysis.hpp"
#include "lobrate/csv.hpp"
#include "lobrate/error.hpp"
#include "lobrate/feed.hpp"

namespace lobrate::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

/// Files of one stage, written only once every one of them is ready.
class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

    void commit() const {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(Errc::IoError, "cannot create " + dir_.string() + ": " + ec.message());
        std::vector<std::pair<fs::path, fs::path>> staged;
        for (const auto& [name, content] : files_) {
            const auto final_path = dir_ / name;
            auto tmp = final_path;
            tmp += ".tmp";
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            os.write(content.data(), static_cast<std::streamsize>(content.size()));
            os.close();
            if (!os) {
                for (const auto& s : staged) fs::remove(s.first, ec);
                fs::remove(tmp, ec);
                throw Error(Errc::IoError, "cannot write " + tmp.string());
            }
            staged.emplace_back(tmp, final_path);
        }
        for (const auto& [tmp, final_path] : staged) {
            fs::rename(tmp, final_path, ec);
            if (ec) throw Error(Errc::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
        }
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string fmt(double v) { return csv::format_double(v); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

rates::Granularity parse_granularity(const std::string& s) {
    if (s == "daily") return rates::Granularity::Daily;
    if (s == "weekly") return rates::Granularity::Weekly;
    if (s == "monthly") return rates::Granularity::Monthly;
    if (s == "hourly") return rates::Granularity::HourlyWeekly;
    throw Error(Errc::FormatError, "unknown granularity '" + s + "' (daily, weekly, monthly, hourly)");
}

std::vector<rates::Granularity> parse_granularities(const std::vector<std::string>& names) {
    std::vector<rates::Granularity> out;
    for (const auto& n : names) {
        const auto g = parse_granularity(n);
        if (std::find(out.begin(), out.end(), g) == out.end()) out.push_back(g);
    }
    if (out.empty()) throw Error(Errc::FormatError, "at least one granularity is required");
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<dist::FamilyTag> parse_families(const std::vector<std::string>& names) {
    std::vector<dist::FamilyTag> out;
    for (const auto& n : names) {
        const auto f = dist::parse_family(n);
        if (!f) throw Error(Errc::FormatError, "unknown family '" + n + "' (geo, dw, bb, exp, pow)");
        if (std::find(out.begin(), out.end(), *f) == out.end()) out.push_back(*f);
    }
    if (out.empty()) throw Error(Errc::FormatError, "at least one family is required");
    std::sort(out.begin(), out.end());
    return out;
}

Side parse_side(const std::string& s) {
    if (s == "buy") return Side::Buy;
    if (s == "sell") return Side::Sell;
    throw Error(Errc::FormatError, "unknown side '" + s + "' (buy, sell)");
}

/// "dw:0.8,1.2" style model descriptions.
dist::ModelFamily parse_model(const std::string& text) {
    const auto colon = text.find(':');
    const auto family = dist::parse_family(text.substr(0, colon));
    if (!family || colon == std::string::npos) throw Error(Errc::FormatError, "bad model '" + text + "'");
    std::vector<double> p;
    for (const auto& f : split(text.substr(colon + 1), ',')) p.push_back(csv::parse_double(f));
    auto need = [&](std::size_t n) {
        if (p.size() != n) {
            throw Error(Errc::FormatError, "model '" + text + "' needs " + std::to_string(n) + " parameter(s)");
        }
    };
    dist::ModelFamily m;
    switch (*family) {
        case dist::FamilyTag::Geometric: need(1); m = dist::Geometric{p[0]}; break;
        case dist::FamilyTag::DiscreteWeibull: need(2); m = dist::DiscreteWeibull{p[0], p[1]}; break;
        case dist::FamilyTag::BetaBinomial: need(2); m = dist::BetaBinomial{p[0], p[1], dist::kBetaBinomialTrials}; break;
        case dist::FamilyTag::Exponential: need(1); m = dist::Exponential{p[0]}; break;
        case dist::FamilyTag::PowerLaw: need(2); m = dist::PowerLaw{p[0], p[1]}; break;
    }
    return m;
}

ordered_json fit_record(const analysis::InstanceFit& inst, const analysis::FamilyFit& f) {
    ordered_json r;
    r["bucket"] = inst.key.label();
    r["side"] = to_string(inst.key.side);
    r["family"] = dist::short_name(f.family);
    if (f.result) {
        ordered_json params = ordered_json::object();
        for (const auto& [name, value] : dist::parameters(f.result->model)) params[name] = value;
        r["params"] = params;
        r["tick_curve"] = f.curve;
        r["l1_error"] = f.l1_error;
        r["converged"] = f.result->converged;
        r["boundary"] = f.result->boundary;
        r["starts_used"] = f.result->starts_used;
    } else {
        r["params"] = nullptr;
        r["tick_curve"] = nullptr;
        r["l1_error"] = nullptr;
        r["converged"] = false;
        r["boundary"] = false;
        r["starts_used"] = 0;
        r["error"] = f.error;
    }
    return r;
}

}  // namespace

void cmd_synth(const synth::SynthSpec& spec, const fs::path& out_dir) {
    const auto out = synth::generate(spec);
    Outputs files(out_dir);
    files.add("stream.lobf", std::string(reinterpret_cast<const char*>(out.stream.data()), out.stream.size()));
    files.add("ground_truth.json", synth::ground_truth_json(spec, out.truth));
    files.commit();
}

void cmd_rates(const RatesConfig& config) {
    if (config.inputs.empty()) throw Error(Errc::FormatError, "no input files");
    if (config.extract.granularities.empty()) throw Error(Errc::FormatError, "at least one granularity is required");
    std::vector<feed::LobfFrame> frames;
    for (const auto& path : config.inputs) {
        const auto bytes = feed::read_file(path.string());
        auto decoded = feed::decode_stream(bytes);
        if (decoded.empty()) throw Error(Errc::FormatError, path.string() + " holds no LOBF frames");
        for (auto& f : decoded) frames.push_back(std::move(f));
    }
    const auto store = rates::extract(frames, config.extract);

    std::ostringstream rates_csv;
    rates::write_rates_csv(rates_csv, store);
    std::ostringstream cancels_csv;
    rates::write_cancels_csv(cancels_csv, store);
    ordered_json diag;
    diag["instances"] = rates::instances(store).size();
    diag["dropped_arrivals"] = store.diagnostics.dropped_arrivals;
    diag["dropped_cancels"] = store.diagnostics.dropped_cancels;
    diag["outside_hours"] = store.diagnostics.outside_hours;
    diag["excluded_replaces"] = store.diagnostics.excluded_replaces;

    Outputs files(config.out_dir);
    files.add("rates.csv", rates_csv.str());
    files.add("cancels.csv", cancels_csv.str());
    files.add("diagnostics.json", diag.dump(2) + "\n");
    files.commit();
}

void cmd_fit(const FitConfig& config) {
    std::ifstream is(config.rates_csv);
    if (!is) throw Error(Errc::IoError, "cannot open " + config.rates_csv.string());
    auto instances = rates::read_rates_csv(is);
    if (!config.granularities.empty()) {
        std::erase_if(instances, [&](const rates::Instance& i) {
            return std::find(config.granularities.begin(), config.granularities.end(), i.key.granularity) ==
                   config.granularities.end();
        });
    }
    if (instances.empty()) throw Error(Errc::FormatError, config.rates_csv.string() + " holds no instances");

    const auto fits = analysis::fit_instances_parallel(instances, config.families, config.fit, config.threads);

    std::vector<analysis::ComparisonGroup> groups;
    for (auto g : analysis::default_groups()) {
        std::erase_if(g.families, [&](dist::FamilyTag f) {
            return std::find(config.families.begin(), config.families.end(), f) == config.families.end();
        });
        if (g.families.size() >= 2) groups.push_back(std::move(g));
    }
    const auto scores = analysis::score(fits, groups);

    ordered_json doc;
    doc["options"] = {{"truncated_likelihood", config.fit.truncated_likelihood},
                      {"families", ordered_json::array()}};
    for (auto f : config.families) doc["options"]["families"].push_back(dist::short_name(f));
    doc["instances"] = fits.size();
    auto& records = doc["fits"];
    records = ordered_json::array();
    for (const auto& inst : fits) {
        for (const auto& f : inst.fits) records.push_back(fit_record(inst, f));
    }

    std::ostringstream scores_csv;
    scores_csv << "bucket_key,side,group,family,l1_error,nps\n";
    for (const auto& s : scores) {
        for (std::size_t i = 0; i < s.families.size(); ++i) {
            scores_csv << s.key.label() << ',' << to_string(s.key.side) << ',' << s.group << ','
                       << dist::short_name(s.families[i]) << ',' << fmt(s.l1_errors[i]) << ',' << fmt(s.nps[i])
                       << '\n';
        }
    }

    std::ostringstream nps_csv;
    nps_csv << "timestep,group,family,mean_nps,sd_nps,n\n";
    for (const auto& r : analysis::summarise_nps(scores)) {
        nps_csv << r.timestep << ',' << r.group << ',' << dist::short_name(r.family) << ',' << fmt(r.nps.mean) << ','
                << fmt(r.nps.sd) << ',' << r.instances << '\n';
    }

    std::vector<std::pair<dist::FamilyTag, dist::FamilyTag>> pairs;
    for (auto other : {dist::FamilyTag::BetaBinomial, dist::FamilyTag::PowerLaw}) {
        const auto has = [&](dist::FamilyTag f) {
            return std::find(config.families.begin(), config.families.end(), f) != config.families.end();
        };
        if (has(dist::FamilyTag::DiscreteWeibull) && has(other)) pairs.emplace_back(dist::FamilyTag::DiscreteWeibull, other);
    }
    std::ostringstream welch_csv;
    welch_csv << "timestep,comparison,tail,t,df,p_value,note\n";
    const char* tail = config.tail == stats::Tail::Two ? "two" : "one";
    for (const auto& w : analysis::compare_nps(scores, config.tail, pairs)) {
        welch_csv << w.timestep << ',' << w.comparison << ',' << tail << ',';
        if (w.result) {
            welch_csv << fmt(w.result->statistic) << ',' << fmt(w.result->degrees_of_freedom) << ','
                      << fmt(w.result->p_value) << ',' << (w.result->flagged ? "constant samples" : "") << '\n';
        } else {
            auto note = w.error;
            std::replace(note.begin(), note.end(), ',', ';');
            welch_csv << "NA,NA,NA," << note << '\n';
        }
    }

    Outputs files(config.out_dir);
    files.add("fits.json", doc.dump(2) + "\n");
    files.add("scores.csv", scores_csv.str());
    files.add("nps.csv", nps_csv.str());
    files.add("welch.csv", welch_csv.str());
    files.commit();
}

void cmd_cancel_test(const CancelTestConfig& config, std::ostream& warn) {
    std::ifstream is(config.cancels_csv);
    if (!is) throw Error(Errc::IoError, "cannot open " + config.cancels_csv.string());
    const auto rows = rates::read_cancels_csv(is);

    struct Cell {
        std::optional<stats::TestResult> side[2];
    };
    std::map<std::pair<rates::Granularity, std::pair<std::int32_t, std::uint8_t>>, std::pair<std::string, Cell>> table;

    std::ostringstream long_csv;
    long_csv << "bucket_key,side,chi2,df,p_value\n";
    for (const auto& row : rows) {
        const auto g = row.key.granularity;
        if (std::find(config.granularities.begin(), config.granularities.end(), g) == config.granularities.end()) {
            continue;
        }
        const auto label = row.key.label();
        std::string missing;
        for (int i = 0; i < kCancelTicks; ++i) {
            if (row.count[i] == 0 || !row.mean_ratio[i]) missing += (missing.empty() ? "" : " ") + std::to_string(i + 1);
        }
        if (!missing.empty()) {
            warn << to_string(Errc::MissingTicks) << ": " << label << ' ' << to_string(row.key.side)
                 << " has no cancels at tick(s) " << missing << "; skipped\n";
            continue;
        }
        std::vector<double> ratios;
        for (const auto& r : row.mean_ratio) ratios.push_back(*r);
        stats::TestResult res;
        try {
            res = stats::chi_square_uniformity(ratios);
        } catch (const Error& e) {
            warn << e.what() << " (" << label << ' ' << to_string(row.key.side) << "); skipped\n";
            continue;
        }
        long_csv << label << ',' << to_string(row.key.side) << ',' << fmt(res.statistic) << ','
                 << fmt(res.degrees_of_freedom) << ',' << fmt(res.p_value) << '\n';
        auto& cell = table[{g, {row.key.period, row.key.slot}}];
        cell.first = label;
        cell.second.side[static_cast<int>(row.key.side)] = res;
    }

    std::ostringstream wide_csv;
    wide_csv << "bucket_key,chi2_buy,chi2_sell,p_buy,p_sell\n";
    for (const auto& [key, cell] : table) {
        const auto& [label, c] = cell;
        auto stat = [&](int s) { return c.side[s] ? fmt(c.side[s]->statistic) : std::string("NA"); };
        auto p = [&](int s) { return c.side[s] ? fmt(c.side[s]->p_value) : std::string("NA"); };
        wide_csv << label << ',' << stat(0) << ',' << stat(1) << ',' << p(0) << ',' << p(1) << '\n';
    }

    Outputs files(config.out_dir);
    files.add("chi2.csv", long_csv.str());
    files.add("chi2_table.csv", wide_csv.str());
    files.commit();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Limit order book arrival and cancellation rate toolkit", "lobrate"};
    app.require_subcommand(1);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded LOBF stream and its ground truth");
    synth::SynthSpec spec;
    std::string synth_out;
    std::string arrival = "dw:0.8,1.2";
    std::string arrival_sell;
    std::string cancel_fraction = "full";
    synth_cmd->add_option("--seed", spec.seed, "RNG seed")->capture_default_str();
    synth_cmd->add_option("--days", spec.days, "Trading days (weekdays only)")->capture_default_str();
    synth_cmd->add_option("--orders-per-day", spec.orders_per_day)->capture_default_str();
    synth_cmd->add_option("--arrival", arrival, "Arrival tick model, e.g. dw:0.8,1.2 or pow:1,1.5")
        ->capture_default_str();
    synth_cmd->add_option("--arrival-sell", arrival_sell, "Sell-side model when it differs from --arrival");
    synth_cmd->add_option("--cancel-probability", spec.cancel_probability)->capture_default_str();
    synth_cmd->add_option("--cancel-fraction", cancel_fraction, "full or uniform")
        ->check(CLI::IsMember({"full", "uniform"}))
        ->capture_default_str();
    synth_cmd->add_option("--replace-probability", spec.replace_probability)->capture_default_str();
    synth_cmd->add_option("--tick-size", spec.tick_size)->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    // rates
    auto* rates_cmd = app.add_subcommand("rates", "Rebuild books and tally arrivals and cancels per bucket");
    std::vector<std::string> inputs;
    std::string rates_out;
    std::vector<std::string> granularities{"daily", "weekly", "monthly", "hourly"};
    std::string reference = "same";
    std::vector<std::string> sides{"buy", "sell"};
    Price tick_size = 1;
    bool exclude_replaces = false;
    rates_cmd->add_option("input", inputs, "LOBF files")->required();
    rates_cmd->add_option("--out", rates_out, "Output directory")->required();
    rates_cmd->add_option("--granularity", granularities)->delimiter(',')->capture_default_str();
    rates_cmd->add_option("--reference", reference, "Tick reference: same or opposite side best price")
        ->check(CLI::IsMember({"same", "opposite"}))
        ->capture_default_str();
    rates_cmd->add_option("--side", sides)->delimiter(',')->capture_default_str();
    rates_cmd->add_option("--tick-size", tick_size)->capture_default_str();
    rates_cmd->add_flag("--exclude-replaces", exclude_replaces, "Leave replace-derived events out of the tallies");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Fit tick models to every instance and compare them");
    std::string rates_csv;
    std::string fit_out;
    std::vector<std::string> families{"geo", "dw", "bb", "exp", "pow"};
    std::vector<std::string> fit_granularities;
    bool truncated = false;
    std::string tail = "two";
    int threads = 0;
    fit_cmd->add_option("rates_csv", rates_csv, "rates.csv from the rates stage")->required();
    fit_cmd->add_option("--out", fit_out, "Output directory")->required();
    fit_cmd->add_option("--families", families)->delimiter(',')->capture_default_str();
    fit_cmd->add_option("--granularity", fit_granularities, "Only fit these granularities")->delimiter(',');
    fit_cmd->add_flag("--truncated-likelihood", truncated, "Renormalise models over 15 ticks inside the likelihood");
    fit_cmd->add_option("--tail", tail, "Welch test: two-sided, or one-sided that Discrete Weibull scores lower")
        ->check(CLI::IsMember({"one", "two"}))
        ->capture_default_str();
    fit_cmd->add_option("--threads", threads, "Worker threads (0 = all)")->capture_default_str();

    // cancel-test
    auto* cancel_cmd = app.add_subcommand("cancel-test", "Chi-square uniformity of cancellation ratios");
    std::string cancels_csv;
    std::string cancel_out;
    std::vector<std::string> cancel_granularities{"weekly", "monthly"};
    cancel_cmd->add_option("cancels_csv", cancels_csv, "cancels.csv from the rates stage")->required();
    cancel_cmd->add_option("--out", cancel_out, "Output directory")->required();
    cancel_cmd->add_option("--granularity", cancel_granularities)->delimiter(',')->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*synth_cmd) {
            const auto buy = parse_model(arrival);
            spec.arrival_model = {buy, arrival_sell.empty() ? buy : parse_model(arrival_sell)};
            spec.cancel_fraction =
                cancel_fraction == "full" ? synth::CancelFraction::Full : synth::CancelFraction::UniformFraction;
            cmd_synth(spec, synth_out);
        } else if (*rates_cmd) {
            RatesConfig cfg;
            for (const auto& i : inputs) cfg.inputs.emplace_back(i);
            cfg.out_dir = rates_out;
            cfg.extract.granularities = parse_granularities(granularities);
            cfg.extract.book.reference =
                reference == "same" ? book::TickReference::SameSide : book::TickReference::OppositeSide;
            cfg.extract.book.tick_size = tick_size;
            if (tick_size == 0) throw Error(Errc::FormatError, "--tick-size must be positive");
            cfg.extract.sides.clear();
            for (const auto& s : sides) cfg.extract.sides.push_back(parse_side(s));
            cfg.extract.include_replaces = !exclude_replaces;
            cmd_rates(cfg);
        } else if (*fit_cmd) {
            FitConfig cfg;
            cfg.rates_csv = rates_csv;
            cfg.out_dir = fit_out;
            cfg.families = parse_families(families);
            if (!fit_granularities.empty()) cfg.granularities = parse_granularities(fit_granularities);
            cfg.fit.truncated_likelihood = truncated;
            cfg.tail = tail == "two" ? stats::Tail::Two : stats::Tail::Less;
            cfg.threads = threads;
            cmd_fit(cfg);
        } else if (*cancel_cmd) {
            CancelTestConfig cfg;
            cfg.cancels_csv = cancels_csv;
            cfg.out_dir = cancel_out;
            cfg.granularities = parse_granularities(cancel_granularities);
            cmd_cancel_test(cfg, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitOk;
}

}  // namespace lobrate::cli
