/* vgs — vacuum-gripping system behavior models and state-machine
 * abstraction. C API of the shared library; all functionality of the CLI is
 * available through these entry points.
 *
 * Conventions:
 *   - Functions returning int give 0 on success or an error status
 *     (VGS_ERR_*); vgs_last_error() returns the message for the calling
 *     thread.
 *   - Functions returning char* give a heap string owned by the caller
 *     (release with vgs_string_free) or NULL on error.
 *   - Handles are opaque; every vgs_*_free accepts NULL.
 */
#ifndef VGS_H
#define VGS_H

#ifdef __cplusplus
extern "C" {
#endif

#define VGS_OK 0
#define VGS_ERR_CONFIG 2
#define VGS_ERR_MODEL 3
#define VGS_ERR_EXPLORATION 4
#define VGS_ERR_IO 5

#define VGS_MDT1 1
#define VGS_MDT2 2
#define VGS_MDT3 3

/* Unknown-input handling of machine execution. */
#define VGS_UNKNOWN_INPUT_HOLD 0
#define VGS_UNKNOWN_INPUT_REJECT 1

typedef struct vgs_graph vgs_graph;
typedef struct vgs_model vgs_model;
typedef struct vgs_discovery vgs_discovery;
typedef struct vgs_machine vgs_machine;
typedef struct vgs_trace vgs_trace;

const char* vgs_version(void);
/* Message of the last failing call on this thread ("" if none). */
const char* vgs_last_error(void);
void vgs_string_free(char* s);

/* --- system graphs ----------------------------------------------------- */
int vgs_graph_parse(const char* text, vgs_graph** out);
int vgs_graph_parse_file(const char* path, vgs_graph** out);
/* JSON array of violations; empty array means valid. */
char* vgs_graph_validate(const vgs_graph* g);
int vgs_graph_assemble(const vgs_graph* g, vgs_model** out);
void vgs_graph_free(vgs_graph* g);

/* --- detailed models --------------------------------------------------- */
char* vgs_model_describe(const vgs_model* m);
/* Self-contained depth-4 bundle (graph + parameters + solver + layout). */
char* vgs_model_bundle(const vgs_model* m, const vgs_graph* g, const char* graph_text);
int vgs_model_run(vgs_model* m, const char* script_json, double dt_s, vgs_trace** out);
void vgs_model_free(vgs_model* m);

/* --- exploration ------------------------------------------------------- */
int vgs_explore(vgs_model* m, const char* config_json, vgs_discovery** out);
char* vgs_discovery_save(const vgs_discovery* d, const char* note);
int vgs_discovery_load(const char* document, vgs_discovery** out);
char* vgs_discovery_dot(const vgs_discovery* d);
void vgs_discovery_free(vgs_discovery* d);

/* --- abstract machines ------------------------------------------------- */
int vgs_synthesize(const vgs_discovery* d, int level, vgs_machine** out);
char* vgs_machine_save(const vgs_machine* m, const char* note);
int vgs_machine_load(const char* document, vgs_machine** out);
char* vgs_machine_dot(const vgs_machine* m);
int vgs_machine_level(const vgs_machine* m);
int vgs_machine_run(const vgs_machine* m, const char* script_json, double dt_s,
                    int unknown_input_policy, vgs_trace** out);
void vgs_machine_free(vgs_machine* m);

/* --- traces ------------------------------------------------------------ */
char* vgs_trace_csv(const vgs_trace* t);
int vgs_trace_from_csv(const char* text, vgs_trace** out);
void vgs_trace_free(vgs_trace* t);

/* --- evaluation -------------------------------------------------------- */
/* phases_json: [{"name":"rising","from_s":0.0,"to_s":1.0}, ...] or NULL. */
char* vgs_compare(const vgs_trace* a, const vgs_trace* b, const char* phases_json);
char* vgs_compare_text(const vgs_trace* a, const vgs_trace* b, const char* phases_json);
/* machine_docs: array of machine documents with their labels. */
char* vgs_bench(const char* graph_text, const char* const* machine_labels,
                const char* const* machine_docs, int machine_count, const char* script_json,
                double dt_s, int repetitions, int parallel);

#ifdef __cplusplus
}
#endif

#endif /* VGS_H */
