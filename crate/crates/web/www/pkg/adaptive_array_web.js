/* @ts-self-types="./adaptive_array_web.d.ts" */

export class RoomResponse {
    static __wrap(ptr) {
        const obj = Object.create(RoomResponse.prototype);
        obj.__wbg_ptr = ptr;
        RoomResponseFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        RoomResponseFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_roomresponse_free(ptr, 0);
    }
    /**
     * Meters; NaN for an anechoic room.
     * @returns {number}
     */
    get criticalDistance() {
        const ret = wasm.roomresponse_criticalDistance(this.__wbg_ptr);
        return ret;
    }
    /**
     * Seconds; NaN for an anechoic room.
     * @returns {number}
     */
    get measuredT60() {
        const ret = wasm.roomresponse_measuredT60(this.__wbg_ptr);
        return ret;
    }
    /**
     * Impulse response samples at 16 kHz.
     * @returns {Float64Array}
     */
    get samples() {
        const ret = wasm.roomresponse_samples(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
}
if (Symbol.dispose) RoomResponse.prototype[Symbol.dispose] = RoomResponse.prototype.free;

export class Separation {
    static __wrap(ptr) {
        const obj = Object.create(Separation.prototype);
        obj.__wbg_ptr = ptr;
        SeparationFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        SeparationFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_separation_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get inputSir() {
        const ret = wasm.__wbg_get_separation_inputSir(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get msc() {
        const ret = wasm.__wbg_get_separation_msc(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get outputSir() {
        const ret = wasm.__wbg_get_separation_outputSir(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set inputSir(arg0) {
        wasm.__wbg_set_separation_inputSir(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set msc(arg0) {
        wasm.__wbg_set_separation_msc(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set outputSir(arg0) {
        wasm.__wbg_set_separation_outputSir(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) Separation.prototype[Symbol.dispose] = Separation.prototype.free;

/**
 * Competitor spacings around `d_sup` for `a = 1..=a_max(d_sup, epsilon)`.
 * @param {number} d_sup
 * @param {number} epsilon
 * @returns {Float64Array}
 */
export function competitorSequence(d_sup, epsilon) {
    const ret = wasm.competitorSequence(d_sup, epsilon);
    if (ret[3]) {
        throw takeFromExternrefTable0(ret[2]);
    }
    var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
    wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
    return v1;
}

/**
 * Response of the 4.5 x 4.5 x 2.5 m room from a source at `angle_deg` and
 * `distance` meters to the center microphone of the array.
 * @param {number} t60
 * @param {number} angle_deg
 * @param {number} distance
 * @returns {RoomResponse}
 */
export function roomResponse(t60, angle_deg, distance) {
    const ret = wasm.roomResponse(t60, angle_deg, distance);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return RoomResponse.__wrap(ret[0]);
}

/**
 * Adapts one sub-array of `spacing` meters for `seconds` on two speech-like
 * sources at `+-angle_deg`, 1 m away, and reports the coherence measure and
 * SIR before and after separation.
 * @param {number} angle_deg
 * @param {number} t60
 * @param {number} spacing
 * @param {number} seconds
 * @param {bigint} seed
 * @returns {Separation}
 */
export function separate(angle_deg, t60, spacing, seconds, seed) {
    const ret = wasm.separate(angle_deg, t60, spacing, seconds, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Separation.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./adaptive_array_web_bg.js": import0,
    };
}

const RoomResponseFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_roomresponse_free(ptr, 1));
const SeparationFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_separation_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('adaptive_array_web_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
