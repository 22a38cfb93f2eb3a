/* tslint:disable */
/* eslint-disable */

/**
 * Sampled trajectory of one run. Per-level series are returned row-major,
 * one row of `n_sites` values per sample.
 */
export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `initial` is one of `infinite-temperature`, `left-loaded`,
     * `ground-state` or `particle-hole` (HOMO to LUMO).
     */
    constructor(n_sites: number, hopping: number, n_electrons: number, temperature: number, initial: string, blocking: boolean, dephasing: boolean, t_max: number, output_interval: number);
    readonly energies: Float64Array;
    readonly equilibrated: boolean;
    readonly fd_targets: Float64Array;
    readonly ground_state_probability: Float64Array;
    /**
     * Largest occupation eigenvalue seen at any accepted step.
     */
    readonly max_occupation: number;
    readonly n_sites: number;
    /**
     * Eigenbasis populations.
     */
    readonly populations: Float64Array;
    readonly site_populations: Float64Array;
    readonly times: Float64Array;
}

/**
 * `[mu, ε_1, n_1, ε_2, n_2, ...]` for the Fermi-Dirac filling of a chain.
 */
export function fermi_dirac(n_sites: number, hopping: number, n_electrons: number, temperature: number): Float64Array;

/**
 * Row-major `n_sites × n_sites` map of |γ(x, x′)| in the site basis for the
 * Fermi-Dirac state at `temperature`. The page takes logarithms itself.
 */
export function localization(n_sites: number, hopping: number, n_electrons: number, temperature: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly fermi_dirac: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly localization: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly simulation_energies: (a: number) => [number, number];
    readonly simulation_equilibrated: (a: number) => number;
    readonly simulation_fd_targets: (a: number) => [number, number];
    readonly simulation_ground_state_probability: (a: number) => [number, number];
    readonly simulation_max_occupation: (a: number) => number;
    readonly simulation_n_sites: (a: number) => number;
    readonly simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
    readonly simulation_populations: (a: number) => [number, number];
    readonly simulation_site_populations: (a: number) => [number, number];
    readonly simulation_times: (a: number) => [number, number];
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
