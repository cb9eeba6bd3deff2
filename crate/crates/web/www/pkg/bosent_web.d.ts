/* tslint:disable */
/* eslint-disable */

/**
 * Witnesses of the coherent spin state `|z, phi; N>`, as JSON.
 */
export function coherent_split_report(z: number, phi: number, n: number): string;

/**
 * `[2m, exact, approx]` triples for `2m = 2, 4, ..., max_order`, flattened.
 */
export function fig1_curve(n: number, max_order: number): Float64Array;

/**
 * `F_Q` of a state for `J_n`, `n = (sin t, 0, cos t)`, at `steps + 1`
 * angles `t` in `[0, pi]`. `kind` is `"twin_fock"` or `"coherent"`.
 */
export function qfi_direction_sweep(kind: string, n: number, z: number, steps: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly coherent_split_report: (a: number, b: number, c: number) => [number, number, number, number];
    readonly fig1_curve: (a: number, b: number) => [number, number, number, number];
    readonly qfi_direction_sweep: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
