/* tslint:disable */
/* eslint-disable */

/**
 * Flattened `[ratio, n_main, n_shift, n_ista, main_fg…, shift_fg…, ista…]`.
 * A run stops early only if its iterate stops moving, so the lengths may differ.
 */
export function convergenceTraces(experiment: string, seed_index: number, iters: number, alpha_fraction: number, lambda: number): Float64Array;

/**
 * Flattened `[alpha, bound_uf, bound_ug, rate_t, rate_v]`, each of length `points`.
 */
export function rateCurves(rho: number, s: number, sigma: number, alpha_max: number, points: number): Float64Array;

/**
 * Flattened `[t, penalty, threshold, reflected]`, each of length `points`.
 */
export function thresholdCurves(tau: number, rho: number, alpha: number, range: number, points: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly convergenceTraces: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly rateCurves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly thresholdCurves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
