#ifndef ARGMINE_H
#define ARGMINE_H

#include <stddef.h>
#include <stdint.h>

#if defined(ARGMINE_BUILDING)
#define ARGMINE_API __attribute__((visibility("default")))
#else
#define ARGMINE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum am_status {
  AM_OK = 0,
  AM_ERR_INVALID_ARGUMENT,
  AM_ERR_IO,
  AM_ERR_PARSE,
  AM_ERR_EMPTY_CORPUS,
  AM_ERR_MALFORMED_DOCUMENT,
  AM_ERR_ENCODING,
  AM_ERR_LAW_SECTION_NOT_FOUND,
  AM_ERR_OVERLAPPING_SPANS,
  AM_ERR_SPAN_OUT_OF_BOUNDS,
  AM_ERR_INVALID_SEQUENCE,
  AM_ERR_ALIGNMENT_MISMATCH,
  AM_ERR_TOO_FEW_ANNOTATORS,
  AM_ERR_EMPTY_CONTINUUM,
  AM_ERR_EMPTY_TRAINING_SET,
  AM_ERR_CONFIG_INVALID,
  AM_ERR_EMPTY_SPLIT,
  AM_ERR_VOCAB_MISSING,
  AM_ERR_LENGTH_MISMATCH,
  AM_ERR_NO_ARGUMENTS,
  AM_ERR_DEGENERATE_CLASS,
  AM_ERR_INTERNAL
} am_status;

typedef struct am_corpus am_corpus;
typedef struct am_tagger am_tagger;

/* Message of the last failing call on this thread; "" if none. */
ARGMINE_API const char* am_last_error(void);
ARGMINE_API const char* am_status_name(am_status status);
ARGMINE_API const char* am_version(void);

/* Every char** output is heap memory owned by the caller. */
ARGMINE_API void am_string_free(char* s);

/* Corpus: a directory of case JSON files, one case file, or a JSON array.
   Cases with fewer than min_gold_spans gold spans are dropped with a warning.
   warnings (nullable) receives one line per notice. */
ARGMINE_API am_status am_corpus_load(const char* path, size_t min_gold_spans, am_corpus** out,
                                     char** warnings);
ARGMINE_API void am_corpus_free(am_corpus* corpus);
ARGMINE_API size_t am_corpus_size(const am_corpus* corpus);
ARGMINE_API am_status am_corpus_case_id(const am_corpus* corpus, size_t index, char** out);
ARGMINE_API am_status am_corpus_save(const am_corpus* corpus, const char* dir);

/* TSV of violations (case, rule, layer, paragraph, index, message). */
ARGMINE_API am_status am_corpus_validate(const am_corpus* corpus, char** report,
                                         size_t* violation_count);

/* Span-level and BIO-tag-level label distributions, as one TSV document. */
ARGMINE_API am_status am_corpus_stats(const am_corpus* corpus, const char* header, char** tsv);

ARGMINE_API am_status am_corpus_split(const am_corpus* corpus, double train, double dev, double test,
                                      uint64_t seed, const char* meta_json, char** split_json,
                                      char** warnings);

/* part: "train", "dev" or "test". */
ARGMINE_API am_status am_corpus_subset(const am_corpus* corpus, const char* split_json,
                                       const char* part, am_corpus** out);

/* Gold BIO columns in the interchange TSV. */
ARGMINE_API am_status am_corpus_encode_tsv(const am_corpus* corpus, const char* header, char** tsv);

/* Converts every .html/.htm/.txt file of in_dir into a case JSON in out_dir and
   writes _manifest.json there. report: one TSV line per input. */
ARGMINE_API am_status am_ingest_directory(const char* in_dir, const char* out_dir, int trim_law,
                                          int jobs, const char* meta_json, char** report);

/* batches_json: {"batch": ["case", ...], ...} or NULL for one batch per corpus. */
ARGMINE_API am_status am_agreement_report(const am_corpus* corpus, const char* batches_json,
                                          const char* header, char** tsv);

/* config_json keys mirror the tagger configuration; missing keys keep defaults. */
ARGMINE_API am_status am_tagger_train(const am_corpus* corpus, const char* split_json,
                                      const char* config_json, am_tagger** out, char** log_tsv);
ARGMINE_API am_status am_tagger_load(const char* path, am_tagger** out);
ARGMINE_API am_status am_tagger_save(const am_tagger* tagger, const char* path, const char* meta_json);
ARGMINE_API void am_tagger_free(am_tagger* tagger);
ARGMINE_API am_status am_tagger_predict_tsv(const am_tagger* tagger, const am_corpus* corpus,
                                            const char* header, int jobs, char** tsv);

/* dimension: "arg" or "actor". Outputs are nullable. */
ARGMINE_API am_status am_eval_tsv(const char* gold_tsv, const char* pred_tsv, const char* dimension,
                                  int exclude_outside, int fixed_universe, const char* header,
                                  char** metrics_tsv, char** metrics_json, char** confusion_csv);

/* Both inputs are metric tables as written by am_eval_tsv. */
ARGMINE_API am_status am_transfer_tsv(const char* original_tsv, const char* updated_tsv,
                                      const char* header, char** out);

ARGMINE_API am_status am_importance_features(const am_corpus* corpus, const char* header, char** csv);

/* c_values: comma-separated list or NULL for the default grid. Trains on a
   stratified 80% of the cases; report_csv scores the held-out 20%. */
ARGMINE_API am_status am_importance_train(const am_corpus* corpus, uint64_t seed, const char* c_values,
                                          const char* meta_json, const char* header,
                                          char** model_json, char** report_csv);

/* Re-scores a saved model on the held-out part selected by its recorded seed. */
ARGMINE_API am_status am_importance_report(const am_corpus* corpus, const char* model_json,
                                           const char* header, char** csv);

ARGMINE_API am_status am_importance_averages(const am_corpus* corpus, const char* header, char** csv);

ARGMINE_API am_status am_importance_weights(const am_corpus* corpus, int class_a, int class_b,
                                            double c, const char* header, char** csv);

#ifdef __cplusplus
}
#endif

#endif
