/** Wire contracts of the orchestration API. The console renders only what
 * these shapes carry; it never invents client-side state. */
export function seriesPath(key) {
    return `${key.scope}/${key.scope_id}/${key.metric}`;
}
