// Regenerates the bundled synthetic referral fixture under data/:
// a synthetic corpus (2,086 records, 235 positives) and its ICD-10-CM
// description dictionary. The generator is deterministic, so committed
// fixtures are reproducible.

#include <cstdio>
#include <fstream>

#include "refertriage/csv.hpp"
#include "support/synthetic_corpus.hpp"

using namespace refertriage;

int main(int argc, char** argv) {
    const std::string dir = argc > 1 ? argv[1] : "data";

    const auto corpus = testsupport::make_synthetic_corpus();

    {
        std::ofstream out(dir + "/referrals_synthetic.csv", std::ios::binary);
        if (!out) {
            std::fprintf(stderr, "cannot write to %s\n", dir.c_str());
            return 1;
        }
        out << "record_id,diagnosis_text,icd10_codes,label\n";
        for (const auto& rec : corpus.dataset.records) {
            std::string codes;
            for (size_t i = 0; i < rec.icd10_codes.size(); ++i) {
                if (i) codes += ';';
                codes += rec.icd10_codes[i];
            }
            out << csv_join({rec.record_id, rec.diagnosis_text, codes,
                             std::to_string(rec.label)})
                << "\n";
        }
    }
    {
        std::ofstream out(dir + "/icd10_dictionary.csv", std::ios::binary);
        out << "code,description\n";
        for (const auto& [code, desc] : corpus.dictionary.entries)
            out << csv_join({code, desc}) << "\n";
    }

    std::printf("wrote %s/referrals_synthetic.csv (%zu records) and %s/icd10_dictionary.csv\n",
                dir.c_str(), corpus.dataset.size(), dir.c_str());
    return 0;
}
